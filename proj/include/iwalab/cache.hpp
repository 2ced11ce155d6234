#ifndef IWALAB_CACHE_HPP
#define IWALAB_CACHE_HPP

#include <memory>
#include <string>
#include <vector>

#include "iwalab/modsym.hpp"

namespace iwalab::cache {

// Disk cache of symbol spaces and Hecke matrices keyed by (N, k); exact
// textual encoding, bit-exact reload.  An empty dir disables the disk layer;
// in-memory memoization is always on.
void set_dir(const std::string& dir);
const std::string& dir();

std::shared_ptr<const ModSymSpace> space(long N, long k);

// Write the space (with whatever Hecke matrices it has accumulated) back.
void persist(const std::shared_ptr<const ModSymSpace>& s);
void persist_all();

void clear_memory();
std::vector<std::pair<long, long>> memory_keys();

}  // namespace iwalab::cache

#endif
