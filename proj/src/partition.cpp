#include "ekcg/partition.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ekcg {

Partition::Partition(std::vector<int> owner, int t) : owner_(std::move(owner)), count_(t) {
  if (t < 1) throw InvalidArgument("partition needs at least one subdomain");
  if (static_cast<Index>(owner_.size()) < t) throw InvalidArgument("more subdomains than indices");
  members_.assign(static_cast<std::size_t>(t), {});
  for (std::size_t i = 0; i < owner_.size(); ++i) {
    const int s = owner_[i];
    if (s < 0 || s >= t)
      throw InvalidArgument("subdomain id " + std::to_string(s) + " out of range at index " + std::to_string(i));
    members_[static_cast<std::size_t>(s)].push_back(static_cast<Index>(i));
  }
  for (int s = 0; s < t; ++s)
    if (members_[static_cast<std::size_t>(s)].empty())
      throw InvalidArgument("subdomain " + std::to_string(s) + " is empty");
}

bool Partition::contiguous() const {
  for (std::size_t i = 1; i < owner_.size(); ++i) {
    const int step = owner_[i] - owner_[i - 1];
    if (step != 0 && step != 1) return false;
  }
  return true;
}

Partition contiguous_partition(Index n, int t) {
  if (t < 1 || t > n) throw InvalidArgument("contiguous_partition: need 1 <= t <= n");
  const Index base = n / t;
  const Index extra = n % t;
  std::vector<int> owner(static_cast<std::size_t>(n));
  Index i = 0;
  for (int s = 0; s < t; ++s) {
    const Index len = base + (s < extra ? 1 : 0);
    for (Index k = 0; k < len; ++k) owner[static_cast<std::size_t>(i++)] = s;
  }
  return Partition(std::move(owner), t);
}

Partition merge_consecutive(const Partition& p, int group) {
  if (group < 1 || p.count() % group != 0)
    throw InvalidArgument("merge_consecutive: subdomain count " + std::to_string(p.count()) +
                          " is not divisible by " + std::to_string(group));
  std::vector<int> owner = p.owners();
  for (int& s : owner) s /= group;
  return Partition(std::move(owner), p.count() / group);
}

Partition halve(const Partition& p) {
  if (p.count() < 2 || p.count() % 2 != 0)
    throw InvalidArgument("halve: subdomain count must be even, got " + std::to_string(p.count()));
  return merge_consecutive(p, 2);
}

bool refines(const Partition& fine, const Partition& coarse) {
  if (fine.size() != coarse.size()) return false;
  for (int s = 0; s < fine.count(); ++s) {
    const auto& m = fine.members(s);
    const int target = coarse.owner(m.front());
    for (Index i : m)
      if (coarse.owner(i) != target) return false;
  }
  return true;
}

namespace {

// Next non-empty, non-comment line; false at end of stream.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

Partition read_partition(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw ParseError("partition file: missing 'n t' header");
  long long n = 0;
  long long t = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> t) || n < 1 || t < 1) throw ParseError("partition file: malformed 'n t' header");
  }
  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(n));
  while (static_cast<long long>(owner.size()) < n && next_data_line(in, line)) {
    std::istringstream ls(line);
    long long id = 0;
    if (!(ls >> id)) throw ParseError("partition file: malformed subdomain id '" + line + "'");
    if (id < 1 || id > t)
      throw ParseError("partition file: subdomain id " + std::to_string(id) + " outside 1.." + std::to_string(t));
    owner.push_back(static_cast<int>(id - 1));
  }
  if (static_cast<long long>(owner.size()) != n)
    throw ParseError("partition file: expected " + std::to_string(n) + " ids, got " + std::to_string(owner.size()));
  if (next_data_line(in, line)) throw ParseError("partition file: trailing data after " + std::to_string(n) + " ids");
  try {
    return Partition(std::move(owner), static_cast<int>(t));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("partition file: ") + e.what());
  }
}

void write_partition(const Partition& p, std::ostream& out) {
  out << p.size() << ' ' << p.count() << '\n';
  for (int s : p.owners()) out << (s + 1) << '\n';
}

}  // namespace ekcg
