// Copyright 2026 The qdakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Content-addressed artifact storage for a project directory.
//
// manifest.txt holds one tab-separated line per artifact, sorted by name:
//
//   name  file  sha256  stage  dict_version  inputs
//
// where inputs is a ';'-joined, sorted list of input=sha256. An input is
// another artifact, a project file ("file:<relative path>") or an external
// key resolved by the caller. An artifact is stale when a recorded input
// hash differs from the input's current hash, or when any input artifact is
// itself stale.

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

inline std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorCode::kStorage, "sha256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

// Writes `content` to a sibling temp file, then renames it over `path`.
// `fault` runs between the two steps so tests can interrupt the write.
inline void atomic_write(const std::filesystem::path& path, std::string_view content,
                         const std::function<void()>& fault = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kStorage, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorCode::kStorage, "short write to '" + tmp.string() + "'");
    }
  }
  if (fault) {
    try {
      fault();
    } catch (...) {
      fs::remove(tmp, ec);
      throw;
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kStorage, "cannot replace '" + path.string() + "'");
  }
}

struct ManifestEntry {
  std::string name;
  std::string file;  // relative to the project root
  std::string sha256;
  std::string stage;
  std::uint64_t dict_version = 0;
  std::map<std::string, std::string> inputs;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline constexpr std::string_view kManifestHeader = "# qdakit manifest v1";

inline std::string manifest_to_text(const std::map<std::string, ManifestEntry>& entries) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& [name, e] : entries) {
    std::vector<std::string> inputs;
    for (const auto& [k, v] : e.inputs) inputs.push_back(k + "=" + v);
    out += e.name + "\t" + e.file + "\t" + e.sha256 + "\t" + e.stage + "\t" +
           std::to_string(e.dict_version) + "\t" + text::join(inputs, ";") + "\n";
  }
  return out;
}

inline std::map<std::string, ManifestEntry> manifest_from_text(std::string_view content) {
  std::map<std::string, ManifestEntry> out;
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(content)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() != 6) {
      throw Error(ErrorCode::kCorruption,
                  "manifest line " + std::to_string(line_no) + ": expected 6 fields");
    }
    ManifestEntry e{f[0], f[1], f[2], f[3], 0, {}};
    e.dict_version = static_cast<std::uint64_t>(text::parse_int(f[4], "dict_version"));
    if (!f[5].empty()) {
      for (const auto& item : text::split(f[5], ';')) {
        auto eq = item.rfind('=');
        if (eq == std::string::npos) {
          throw Error(ErrorCode::kCorruption,
                      "manifest line " + std::to_string(line_no) + ": malformed input");
        }
        e.inputs[item.substr(0, eq)] = item.substr(eq + 1);
      }
    }
    out[e.name] = std::move(e);
  }
  return out;
}

inline void check_artifact_name(std::string_view name) {
  const bool ok = !name.empty() && name[0] != '.' &&
                  std::all_of(name.begin(), name.end(), [](char c) {
                    return text::is_ascii_alnum(static_cast<unsigned char>(c)) || c == '.' ||
                           c == '_' || c == '-';
                  });
  if (!ok) throw Error(ErrorCode::kValidation, "invalid artifact name '" + std::string(name) + "'");
}

class Project {
 public:
  // Current hash of an external input, or nullopt when unknown.
  using Resolver = std::function<std::optional<std::string>(std::string_view)>;

  static constexpr std::string_view kFilePrefix = "file:";

  // Creates the directory layout and an empty manifest; existing projects
  // are opened unchanged.
  static Project init(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    for (const char* dir : {"inputs/training", "inputs/testing", "inputs/training_questions",
                            "inputs/testing_questions", "inputs/stopwords", "inputs/wordlists",
                            "artifacts", "logs"}) {
      fs::create_directories(root / dir, ec);
      if (ec) throw Error(ErrorCode::kStorage, "cannot create '" + (root / dir).string() + "'");
    }
    if (!fs::exists(root / "manifest.txt")) {
      atomic_write(root / "manifest.txt", std::string(kManifestHeader) + "\n");
    }
    return open(root);
  }

  static Project open(const std::filesystem::path& root) {
    const auto path = root / "manifest.txt";
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(ErrorCode::kNotFound, "no project at '" + root.string() + "'");
    }
    Project p;
    p.root_ = root;
    p.manifest_ = manifest_from_text(read_file(path));
    return p;
  }

  const std::filesystem::path& root() const { return root_; }
  const std::map<std::string, ManifestEntry>& manifest() const { return manifest_; }
  void set_resolver(Resolver r) { resolver_ = std::move(r); }
  void set_fault_hook(std::function<void()> hook) { fault_ = std::move(hook); }

  const ManifestEntry* entry(std::string_view name) const {
    auto it = manifest_.find(std::string(name));
    return it == manifest_.end() ? nullptr : &it->second;
  }

  bool has(std::string_view name) const { return entry(name) != nullptr; }

  // Current hash of any input kind.
  std::optional<std::string> current_hash(std::string_view input) const {
    if (input.substr(0, kFilePrefix.size()) == kFilePrefix) {
      auto path = root_ / std::string(input.substr(kFilePrefix.size()));
      if (!std::filesystem::is_regular_file(path)) return std::nullopt;
      return sha256_hex(read_file(path));
    }
    if (const auto* e = entry(input)) return e->sha256;
    if (resolver_) return resolver_(input);
    return std::nullopt;
  }

  // Inputs whose recorded hash no longer matches, followed recursively.
  std::vector<std::string> stale_inputs(std::string_view name) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_stale(std::string(name), out, seen);
    return out;
  }

  bool is_stale(std::string_view name) const { return !stale_inputs(name).empty(); }

  ManifestEntry save_artifact(const std::string& name, std::string_view content,
                              const std::string& stage,
                              const std::map<std::string, std::string>& inputs = {},
                              std::uint64_t dict_version = 0) {
    check_artifact_name(name);
    for (const auto& [input, hash] : inputs) {
      if (input == name || depends_on(input, name)) {
        throw Error(ErrorCode::kValidation,
                    "dependency cycle: '" + name + "' cannot consume '" + input + "'");
      }
    }
    ManifestEntry e{name, "artifacts/" + name, sha256_hex(content), stage, dict_version, inputs};
    const auto* old = entry(name);
    const bool same_bytes = old != nullptr && old->sha256 == e.sha256 &&
                            std::filesystem::is_regular_file(root_ / e.file);
    if (!same_bytes) atomic_write(root_ / e.file, content, fault_);
    if (old == nullptr || !(*old == e)) {
      auto next = manifest_;
      next[name] = e;
      atomic_write(root_ / "manifest.txt", manifest_to_text(next));
      manifest_ = std::move(next);
    }
    return e;
  }

  std::string load_artifact(std::string_view name, bool allow_stale = false) const {
    const auto* e = entry(name);
    if (e == nullptr) {
      throw Error(ErrorCode::kNotFound, "artifact '" + std::string(name) + "' not found");
    }
    const auto path = root_ / e->file;
    if (!std::filesystem::is_regular_file(path)) {
      throw Error(ErrorCode::kNotFound, "artifact file '" + e->file + "' missing");
    }
    std::string content = read_file(path);
    if (sha256_hex(content) != e->sha256) {
      throw Error(ErrorCode::kCorruption,
                  "artifact '" + std::string(name) + "' does not match its recorded hash");
    }
    if (!allow_stale) {
      auto stale = stale_inputs(name);
      if (!stale.empty()) {
        throw Error(ErrorCode::kStale, "artifact '" + std::string(name) +
                                           "' is stale; changed inputs: " +
                                           text::join(stale, ", "));
      }
    }
    return content;
  }

  // Appends one line to a file under logs/.
  void append_log(std::string_view log_name, std::string_view line) const {
    const auto path = root_ / "logs" / std::string(log_name);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << line;
    if (line.empty() || line.back() != '\n') out << '\n';
    if (!out) throw Error(ErrorCode::kStorage, "cannot append to '" + path.string() + "'");
  }

  std::string read_log(std::string_view log_name) const {
    const auto path = root_ / "logs" / std::string(log_name);
    if (!std::filesystem::is_regular_file(path)) return {};
    return read_file(path);
  }

 private:
  bool depends_on(const std::string& from, const std::string& target) const {
    std::set<std::string> seen;
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      std::string cur = stack.back();
      stack.pop_back();
      if (cur == target) return true;
      if (!seen.insert(cur).second) continue;
      if (const auto* e = entry(cur)) {
        for (const auto& [in, h] : e->inputs) stack.push_back(in);
      }
    }
    return false;
  }

  void collect_stale(const std::string& name, std::vector<std::string>& out,
                     std::set<std::string>& seen) const {
    if (!seen.insert(name).second) return;
    const auto* e = entry(name);
    if (e == nullptr) return;
    for (const auto& [input, recorded] : e->inputs) {
      auto now = current_hash(input);
      if (!now || *now != recorded) {
        if (std::find(out.begin(), out.end(), input) == out.end()) out.push_back(input);
      }
      if (entry(input) != nullptr) collect_stale(input, out, seen);
    }
  }

  std::filesystem::path root_;
  std::map<std::string, ManifestEntry> manifest_;
  Resolver resolver_;
  std::function<void()> fault_;
};

// Exclusive project lock held for the lifetime of the object. A lock left
// by a dead process is reclaimed.
class ProjectLock {
 public:
  explicit ProjectLock(const std::filesystem::path& root) : path_(root / ".lock") {
    for (int attempt = 0; attempt < 2; ++attempt) {
      int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
      if (fd >= 0) {
        const std::string pid = std::to_string(::getpid()) + "\n";
        const ssize_t written = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        if (written != static_cast<ssize_t>(pid.size())) {
          std::filesystem::remove(path_);
          throw Error(ErrorCode::kStorage, "cannot write lock file");
        }
        return;
      }
      if (errno != EEXIST) {
        throw Error(ErrorCode::kStorage, "cannot create lock '" + path_.string() + "'");
      }
      if (!holder_dead()) break;
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
    throw Error(ErrorCode::kConflict,
                "project is locked by another process ('" + path_.string() + "')");
  }

  ~ProjectLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;

 private:
  bool holder_dead() const {
    std::ifstream in(path_);
    long long pid = 0;
    if (!(in >> pid) || pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) != 0 && errno == ESRCH;
  }

  std::filesystem::path path_;
};

}  // namespace qdakit
