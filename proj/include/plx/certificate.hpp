#ifndef PLX_CERTIFICATE_HPP
#define PLX_CERTIFICATE_HPP

#include <string>
#include <vector>

namespace plx {

/// Machine-readable record of one verified inequality. `margin` is the
/// worst-case slack (negative when violated beyond tolerance) and
/// `location` the node where it is attained.
struct BoundCertificate {
    std::string name;
    bool satisfied = false;
    double margin = 0.0;
    int location = -1;
    std::string note;
};

inline bool all_satisfied(const std::vector<BoundCertificate>& certs) {
    for (const auto& c : certs)
        if (!c.satisfied) return false;
    return true;
}

}  // namespace plx

#endif
