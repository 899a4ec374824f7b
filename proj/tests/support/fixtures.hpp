#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "intimacy/corpus.hpp"

namespace intimacy::testing {

/// Rows of the input-representation table: language, original tweet, its
/// English translation, and the expected joint rendering.
struct RepresentationRow {
  const char* language;
  const char* original;
  const char* translated;
  const char* joint;
};

inline const std::array<RepresentationRow, 4>& representation_rows() {
  static const std::array<RepresentationRow, 4> rows{{
      {"fr", "j’ai plus aucune force", "I have no more strength",
       "j’ai plus aucune force </s></s> I have no more strength"},
      {"it",
       "La mia prima stagione e, forse per questo, la mia favorita buon compleanno #Reggina107 http",
       "My first season and, perhaps for this reason, my favorite happy birthday #Reggina107 http",
       "La mia prima stagione e, forse per questo, la mia favorita buon compleanno #Reggina107 "
       "http </s></s> My first season and, perhaps for this reason, my favorite happy birthday "
       "#Reggina107 http"},
      {"es", "@user Es normal cuando no se sale bien", "@user It's normal when it doesn't work out",
       "@user Es normal cuando no se sale bien </s></s> @user It's normal when it doesn't work out"},
      {"zh",
       "开学了 会更新的慢一点了 "
       "快万粉了 你们有什么想看的吗 http",
       "The school has started, the update will be a bit slower, I am almost 10,000 fans, do you "
       "have anything you want to see http",
       "开学了 会更新的慢一点了 "
       "快万粉了 你们有什么想看的吗 http "
       "</s></s> The school has started, the update will be a bit slower, I am almost 10,000 "
       "fans, do you have anything you want to see http"},
  }};
  return rows;
}

/// Training-set language counts of the task data (9,491 records in total).
inline const std::vector<std::pair<std::string, std::size_t>>& training_language_counts() {
  static const std::vector<std::pair<std::string, std::size_t>> counts{
      {"en", 1587}, {"es", 1592}, {"it", 1532}, {"pt", 1596}, {"fr", 1588}, {"zh", 1596}};
  return counts;
}

/// A labeled dataset with the given per-language counts; texts are synthetic.
Dataset counts_fixture(const std::vector<std::pair<std::string, std::size_t>>& counts);

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace intimacy::testing
