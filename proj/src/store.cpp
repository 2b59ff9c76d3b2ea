#include "salad/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "salad/json_io.hpp"
#include "salad/sha256.hpp"

namespace salad {

namespace fs = std::filesystem;

namespace {

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, std::string_view bytes, const fs::path& path) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoFailure("write " + path.string() + ": " + errno_text());
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure("read " + path.string());
  return buf.str();
}

bool valid_audio_id(std::string_view id) {
  if (id.size() != 64) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoFailure("open " + tmp.string() + ": " + errno_text());
  try {
    write_all(fd, bytes, tmp);
    if (::fsync(fd) != 0) throw IoFailure("fsync " + tmp.string() + ": " + errno_text());
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const std::string why = errno_text();
    ::unlink(tmp.c_str());
    throw IoFailure("rename " + tmp.string() + " -> " + path.string() + ": " + why);
  }
  fsync_dir(path.parent_path());
}

std::string serialize_db(const VocabDatabase& db) { return to_json(db).dump(2) + "\n"; }

VocabDatabase parse_db(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::exception& e) {
    throw CorruptStore(std::string("vocab.json does not parse: ") + e.what());
  }
  try {
    return vocab_from_json(j);
  } catch (const Error& e) {
    throw CorruptStore("vocab.json: " + std::string(e.what()));
  } catch (const Json::exception& e) {
    throw CorruptStore("vocab.json: " + std::string(e.what()));
  }
}

Store::Store(fs::path data_dir) : data_dir_(std::move(data_dir)) {
  std::error_code ec;
  fs::create_directories(audio_dir(), ec);
  if (ec) throw IoFailure("cannot create " + audio_dir().string() + ": " + ec.message());
}

VocabDatabase Store::load_db() const {
  if (!fs::exists(vocab_path())) return VocabDatabase{};
  return parse_db(read_file(vocab_path()));
}

void Store::save_db(const VocabDatabase& db) const {
  validate(db);
  write_file_atomic(vocab_path(), serialize_db(db));
}

void Store::append_session(const SessionRecord& record) {
  validate(record);
  const std::string line = to_json(record).dump() + "\n";
  std::lock_guard lock(session_mutex_);
  const int fd = ::open(sessions_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw IoFailure("open " + sessions_path().string() + ": " + errno_text());
  try {
    write_all(fd, line, sessions_path());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

std::vector<SessionRecord> Store::load_sessions() const {
  std::vector<SessionRecord> out;
  if (!fs::exists(sessions_path())) return out;
  std::istringstream in(read_file(sessions_path()));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(session_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptStore("sessions.ndjson line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string Store::put_audio(const AudioClip& clip) const {
  const std::string bytes = encode_wav(clip);
  const std::string id = sha256_hex(bytes);
  const fs::path path = audio_dir() / (id + ".wav");
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return id;
}

bool Store::has_audio(std::string_view id) const {
  return valid_audio_id(id) && fs::exists(audio_dir() / (std::string(id) + ".wav"));
}

std::string Store::get_audio_bytes(std::string_view id) const {
  if (!has_audio(id)) throw NotFound("audio '" + std::string(id) + "'");
  return read_file(audio_dir() / (std::string(id) + ".wav"));
}

AudioClip Store::get_audio(std::string_view id) const { return decode_wav(get_audio_bytes(id)); }

StoreHandle::StoreHandle(std::shared_ptr<Store> store)
    : store_(std::move(store)), committed_(std::make_shared<const VocabDatabase>(store_->load_db())) {}

std::shared_ptr<const VocabDatabase> StoreHandle::snapshot() const {
  std::shared_lock lock(snapshot_mutex_);
  return committed_;
}

StoreHandle::Transaction StoreHandle::begin() { return Transaction(*this, std::unique_lock(writer_)); }

StoreHandle::Transaction::Transaction(StoreHandle& owner, std::unique_lock<std::mutex> lock)
    : owner_(&owner), lock_(std::move(lock)), base_(owner.snapshot()) {}

void StoreHandle::Transaction::commit(VocabDatabase next) {
  owner_->store_->save_db(next);
  auto published = std::make_shared<const VocabDatabase>(std::move(next));
  {
    std::unique_lock lock(owner_->snapshot_mutex_);
    owner_->committed_ = published;
  }
  base_ = std::move(published);
}

}  // namespace salad
