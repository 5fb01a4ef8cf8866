#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "polydawg/bql/ast.hpp"
#include "polydawg/engines/data.hpp"
#include "polydawg/error.hpp"

namespace polydawg::engines {

/// Logical object name (as written in a query) to physical name on an engine.
/// Names absent from the map are used as-is.
using Bindings = std::map<std::string, std::string>;

const std::string& physical_name(const Bindings& bindings, const std::string& name);

/// Named immutable objects. Readers get a snapshot pointer; writers replace
/// whole objects under an exclusive lock.
template <typename T>
class ObjectStore {
 public:
  explicit ObjectStore(ErrorCode missing) : missing_(missing) {}

  std::shared_ptr<const T> get(const std::string& name) const {
    std::shared_lock lock(mutex_);
    auto it = objects_.find(name);
    if (it == objects_.end()) throw Error(missing_, "no object named '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return objects_.count(name) != 0;
  }

  void put(const std::string& name, T value, bool replace) {
    auto ptr = std::make_shared<const T>(std::move(value));
    std::unique_lock lock(mutex_);
    if (!replace && objects_.count(name)) {
      throw Error(ErrorCode::Duplicate, "object '" + name + "' already exists");
    }
    objects_[name] = std::move(ptr);
  }

  /// Applies `fn` to a copy of the object and stores the result; the write
  /// is all-or-nothing.
  template <typename Fn>
  void update(const std::string& name, Fn&& fn) {
    std::unique_lock lock(mutex_);
    auto it = objects_.find(name);
    if (it == objects_.end()) throw Error(missing_, "no object named '" + name + "'");
    T copy = *it->second;
    fn(copy);
    it->second = std::make_shared<const T>(std::move(copy));
  }

  bool erase(const std::string& name) {
    std::unique_lock lock(mutex_);
    return objects_.erase(name) != 0;
  }

  std::vector<std::string> names() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [name, _] : objects_) out.push_back(name);
    return out;
  }

 private:
  ErrorCode missing_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const T>> objects_;
};

/// Common surface of the three in-process engines.
class StorageEngine {
 public:
  virtual ~StorageEngine() = default;

  virtual bql::Island island() const = 0;

  /// Runs an island body. Object names resolve through `bindings`.
  virtual ResultSet execute(const bql::IslandQuery& query, const Bindings& bindings) const = 0;

  /// Whole object in this engine's data model.
  virtual ResultSet read_object(const std::string& name) const = 0;
  /// Stores `data` (which must be in this engine's model) under `name`.
  virtual void write_object(const std::string& name, ResultSet data, bool replace) = 0;

  virtual bool has_object(const std::string& name) const = 0;
  virtual bool drop_object(const std::string& name) = 0;
  virtual std::vector<std::string> object_names() const = 0;
  /// Rows, cells or entries held by `name`.
  virtual std::size_t object_size(const std::string& name) const = 0;

  /// Number of execute/read/write calls served.
  std::uint64_t call_count() const { return calls_.load(); }

 protected:
  void count_call() const { calls_.fetch_add(1); }

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
};

std::unique_ptr<StorageEngine> make_engine(bql::Island island);

}  // namespace polydawg::engines
