#pragma once

#include <iosfwd>

namespace nusrec {

// Fast end-to-end property checks over the whole pipeline (adjoint identity,
// Gram consistency, pseudo-inverse identities, encoder identities, iteration
// fixed points, config round trip). Prints one line per check and returns
// the number of failures.
int run_selftest(std::ostream& os);

} // namespace nusrec
