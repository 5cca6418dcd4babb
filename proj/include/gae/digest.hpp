#pragma once

#include "gae/types.hpp"

namespace gae {

/// SHA-256 over the given bytes. Every hash lock and consent digest in the
/// simulator goes through this one function.
HashValue sha256(const Bytes& data);
HashValue sha256(const Preimage& preimage);

}  // namespace gae
