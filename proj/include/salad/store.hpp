#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "salad/audio.hpp"
#include "salad/vocab.hpp"

namespace salad {

/// On-disk layout under one data directory:
///
///   vocab.json        canonical vocabulary database
///   sessions.ndjson   one session record per line, append-only
///   audio/<sha256>.wav content-addressed clips
class Store {
 public:
  static constexpr int kSchemaVersion = kVocabSchemaVersion;

  /// Creates the directory layout if missing.
  explicit Store(std::filesystem::path data_dir);

  const std::filesystem::path& data_dir() const noexcept { return data_dir_; }
  std::filesystem::path vocab_path() const { return data_dir_ / "vocab.json"; }
  std::filesystem::path sessions_path() const { return data_dir_ / "sessions.ndjson"; }
  std::filesystem::path audio_dir() const { return data_dir_ / "audio"; }

  /// Missing file gives an empty database; anything unparsable or violating
  /// an invariant throws CorruptStore.
  VocabDatabase load_db() const;
  /// Validates, then writes through a temporary file and rename.
  void save_db(const VocabDatabase& db) const;

  void append_session(const SessionRecord& record);
  std::vector<SessionRecord> load_sessions() const;

  /// Returns the SHA-256 of the WAV bytes; storing the same bytes twice is a no-op.
  std::string put_audio(const AudioClip& clip) const;
  std::string get_audio_bytes(std::string_view id) const;
  AudioClip get_audio(std::string_view id) const;
  bool has_audio(std::string_view id) const;

 private:
  std::filesystem::path data_dir_;
  std::mutex session_mutex_;
};

/// Canonical bytes of vocab.json: key-sorted, two-space indented, trailing newline.
std::string serialize_db(const VocabDatabase& db);
/// Throws CorruptStore.
VocabDatabase parse_db(std::string_view bytes);

/// Writes `path.tmp`, flushes it to disk, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// The single-writer front of a Store. Readers take immutable snapshots of
/// the last committed database; writers serialize through transactions.
class StoreHandle {
 public:
  explicit StoreHandle(std::shared_ptr<Store> store);

  Store& store() const noexcept { return *store_; }
  std::shared_ptr<const VocabDatabase> snapshot() const;

  class Transaction {
   public:
    const VocabDatabase& current() const noexcept { return *base_; }
    /// Persists `next` and publishes it to readers.
    void commit(VocabDatabase next);

   private:
    friend class StoreHandle;
    Transaction(StoreHandle& owner, std::unique_lock<std::mutex> lock);

    StoreHandle* owner_;
    std::unique_lock<std::mutex> lock_;
    std::shared_ptr<const VocabDatabase> base_;
  };

  /// Blocks until no other transaction is open.
  Transaction begin();

 private:
  std::shared_ptr<Store> store_;
  std::mutex writer_;
  mutable std::shared_mutex snapshot_mutex_;
  std::shared_ptr<const VocabDatabase> committed_;
};

}  // namespace salad
