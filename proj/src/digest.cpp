#include "gae/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace gae {

HashValue sha256(const Bytes& data) {
    HashValue out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len,
                   EVP_sha256(), nullptr) != 1 ||
        len != out.bytes.size()) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

HashValue sha256(const Preimage& preimage) { return sha256(preimage.bytes); }

}  // namespace gae
