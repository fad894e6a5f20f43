#include "wpcurve/gradcheck.hpp"

#include "wpcurve/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wpc {

double gradCheck(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> x,
                 std::span<const double> analyticGrad,
                 double h) {
    if (x.size() != analyticGrad.size()) {
        throw DataError("gradCheck: point has " + std::to_string(x.size()) +
                        " coordinates but gradient has " + std::to_string(analyticGrad.size()));
    }
    if (!(h > 0.0)) throw DataError("gradCheck: step h must be positive");

    std::vector<double> point(x.begin(), x.end());
    if (!std::isfinite(f(point))) throw NumericError("gradCheck: f(x) is not finite");

    double worst = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double orig = point[i];
        point[i] = orig + h;
        const double fPlus = f(point);
        point[i] = orig - h;
        const double fMinus = f(point);
        point[i] = orig;
        if (!std::isfinite(fPlus) || !std::isfinite(fMinus)) {
            throw NumericError("gradCheck: f not finite near coordinate " + std::to_string(i));
        }
        const double central = (fPlus - fMinus) / (2.0 * h);
        const double denom = std::max({std::abs(analyticGrad[i]), std::abs(central), 1e-8});
        worst = std::max(worst, std::abs(analyticGrad[i] - central) / denom);
    }
    return worst;
}

} // namespace wpc
