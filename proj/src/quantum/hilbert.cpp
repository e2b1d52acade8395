#include "ringcav/quantum.hpp"

#include <stdexcept>

namespace ringcav::quantum {

std::vector<int> HilbertSpace::momenta() const {
    std::vector<int> n;
    const int step = sector == MomentumSector::Even ? 2 : 1;
    const int top = sector == MomentumSector::Even ? n_mom - (n_mom % 2) : n_mom;
    for (int k = -top; k <= top; k += step) n.push_back(k);
    return n;
}

int HilbertSpace::motional_dim() const { return int(momenta().size()); }

int HilbertSpace::field_dim(FieldTreatment t) const {
    const int sine = n_fock_sine + 1;
    return t == FieldTreatment::FullTwoMode ? sine * (n_fock_cos + 1) : sine;
}

}  // namespace ringcav::quantum
