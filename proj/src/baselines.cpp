#include "saber/baselines.hpp"

namespace saber {

DetectorKind detector_from_name(const std::string& name) {
    DetectorKind k;
    if (name == "cvm") {
        k.is_cvm = true;
        return k;
    }
    k.variant = variant_from_name(name);
    return k;
}

}  // namespace saber
