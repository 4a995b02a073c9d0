#include "polydina/equivalence.hpp"

#include <string>

namespace polydina {

namespace {

void require_unrestricted(const QMatrix& q) {
    if (!q.is_unrestricted())
        fail(Errc::precondition,
             "model equivalence is defined only for unrestricted Q-matrices "
             "(all categories of an item must share one q-vector)");
}

// One branch (all-plus or all-minus) of the forward map.
std::vector<double> seq_branch_to_theta(const std::vector<double>& beta) {
    const std::size_t H = beta.size();
    std::vector<double> theta(H);
    double running = 1.0;
    for (std::size_t l = 0; l < H; ++l) {
        running *= beta[l];                                  // prod_{h<=l} beta_h
        const double beta_next = (l + 1 < H) ? beta[l + 1] : 0.0;
        theta[l] = (1.0 - beta_next) * running;
    }
    return theta;
}

// One branch of the inverse map; `where` names the item for error messages.
std::vector<double> theta_branch_to_beta(const std::vector<double>& theta, int item) {
    const std::size_t H = theta.size();
    // tail[l] = sum_{h>=l} theta_h over h=1..H; theta_0 enters via tail[0].
    std::vector<double> tail(H + 2, 0.0);
    for (std::size_t l = H; l >= 1; --l) tail[l] = tail[l + 1] + theta[l - 1];
    tail[0] = 1.0; // includes theta_0 = 1 - sum_{l>=1}
    std::vector<double> beta(H);
    for (std::size_t l = 1; l <= H; ++l) {
        if (tail[l - 1] <= 0.0)
            fail(Errc::numeric, "item " + std::to_string(item) + " category " +
                                    std::to_string(l) +
                                    ": zero denominator (sum of category probabilities from " +
                                    std::to_string(l - 1) + " on is 0)");
        beta[l - 1] = tail[l] / tail[l - 1];
    }
    return beta;
}

} // namespace

GpdinaParams seq_to_gpdina(const SeqParams& par, const QMatrix& q) {
    require_unrestricted(q);
    validate_seq_bounds(par, q);
    for (int j = 0; j < q.J(); ++j)
        for (int l = 1; l < q.ncat(j); ++l)
            if (par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l) - 1] == 0.0)
                fail(Errc::precondition,
                     "item " + std::to_string(j + 1) + " category " + std::to_string(l) +
                         ": zero-guess cascade cut; sequential parameters beyond it are not "
                         "well-defined for the mapping");
    GpdinaParams out;
    out.theta_plus.reserve(par.beta_plus.size());
    out.theta_minus.reserve(par.beta_minus.size());
    for (std::size_t j = 0; j < par.beta_plus.size(); ++j) {
        out.theta_plus.push_back(seq_branch_to_theta(par.beta_plus[j]));
        out.theta_minus.push_back(seq_branch_to_theta(par.beta_minus[j]));
    }
    validate_gpdina_bounds(out, q);
    return out;
}

SeqParams gpdina_to_seq(const GpdinaParams& par, const QMatrix& q) {
    require_unrestricted(q);
    validate_gpdina_bounds(par, q);
    SeqParams out;
    out.beta_plus.reserve(par.theta_plus.size());
    out.beta_minus.reserve(par.theta_minus.size());
    for (std::size_t j = 0; j < par.theta_plus.size(); ++j) {
        out.beta_plus.push_back(theta_branch_to_beta(par.theta_plus[j], static_cast<int>(j) + 1));
        out.beta_minus.push_back(theta_branch_to_beta(par.theta_minus[j], static_cast<int>(j) + 1));
    }
    validate_seq_bounds(out, q);
    return out;
}

} // namespace polydina
