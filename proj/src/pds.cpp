#include "mprk/pds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mprk {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void defective(const std::string& name, const std::string& what) {
  throw std::runtime_error("production matrix of '" + name + "' " + what);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

ProductionMatrix::ProductionMatrix(Matrix entries) : mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("ProductionMatrix: entries must be square");
  }
  for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
      const double v = mat_(i, j);
      if (!std::isfinite(v)) {
        throw std::runtime_error("ProductionMatrix: non-finite rate entry");
      }
      if (v < 0.0) {
        throw std::runtime_error("ProductionMatrix: negative rate entry");
      }
    }
    if (mat_(i, i) != 0.0) {
      throw std::runtime_error("ProductionMatrix: nonzero diagonal entry");
    }
  }
}

ProductionMatrix eval_production(const PDSystem& sys, const Vector& y) {
  if (y.size() != sys.dim) {
    throw std::invalid_argument("eval_production: state dimension " +
                                std::to_string(y.size()) + " does not match system '" +
                                sys.name + "' of dimension " + std::to_string(sys.dim));
  }
  Matrix raw = sys.production(y);
  if (raw.rows() != sys.dim || raw.cols() != sys.dim) {
    defective(sys.name, "has wrong dimensions");
  }
  try {
    return ProductionMatrix(std::move(raw));
  } catch (const std::runtime_error& e) {
    defective(sys.name, std::string("is invalid: ") + e.what());
  }
}

Vector eval_rhs(const PDSystem& sys, const Vector& y) {
  const ProductionMatrix p = eval_production(sys, y);
  return p.production() - p.destruction();
}

Vector exact_solution(const PDSystem& sys, double t, const Vector& y0) {
  if (!sys.exact) {
    throw std::invalid_argument("system '" + sys.name + "' has no closed-form solution");
  }
  if (y0.size() != sys.dim) {
    throw std::invalid_argument("exact_solution: initial state dimension mismatch");
  }
  return sys.exact(t, y0);
}

PDSystem linear_exchange(double a) {
  PDSystem sys;
  sys.name = "linear";
  sys.dim = 2;
  sys.production = [a](const Vector& y) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 1) = y[1];
    p(1, 0) = a * y[0];
    return p;
  };
  sys.exact = [a](double t, const Vector& y0) {
    const double total = y0[0] + y0[1];
    const double y1_inf = total / (a + 1.0);
    const double c = y0[0] / y1_inf - 1.0;
    Vector y(2);
    y[0] = (1.0 + c * std::exp(-(a + 1.0) * t)) * y1_inf;
    y[1] = total - y[0];
    return y;
  };
  sys.default_initial = Vector{{0.9, 0.1}};
  return sys;
}

PDSystem algal_bloom(double a) {
  PDSystem sys;
  sys.name = "nonlinear";
  sys.dim = 3;
  sys.production = [a](const Vector& y) {
    Matrix p = Matrix::Zero(3, 3);
    p(1, 0) = y[0] * y[1] / (y[0] + 1.0);  // nutrient uptake
    p(2, 1) = a * y[1];                    // plankton loss to detritus
    return p;
  };
  sys.default_initial = Vector{{9.98, 0.01, 0.01}};
  return sys;
}

PDSystem brusselator() {
  PDSystem sys;
  sys.name = "brusselator";
  sys.dim = 6;
  sys.production = [](const Vector& y) {
    Matrix p = Matrix::Zero(6, 6);
    p(2, 1) = y[1] * y[4];
    p(3, 4) = y[4];
    p(4, 0) = y[0];
    p(4, 5) = y[4] * y[4] * y[5];
    p(5, 4) = y[1] * y[4];
    return p;
  };
  sys.default_initial = Vector{{10.0, 10.0, kEps, kEps, 0.1, 0.1}};
  return sys;
}

PDSystem robertson() {
  PDSystem sys;
  sys.name = "robertson";
  sys.dim = 3;
  sys.production = [](const Vector& y) {
    Matrix p = Matrix::Zero(3, 3);
    p(0, 1) = 1.0e4 * y[1] * y[2];
    p(1, 0) = 0.04 * y[0];
    p(2, 1) = 3.0e7 * y[1] * y[1];
    return p;
  };
  sys.default_initial = Vector{{1.0 - 2.0 * kEps, kEps, kEps}};
  return sys;
}

PDSystem monomial_pair(const MonomialPairParams& params) {
  if (params.donor == params.acceptor) {
    throw std::invalid_argument("monomial_pair: donor and acceptor must differ");
  }
  if (params.donor < 1 || params.acceptor < 1 || params.donor > params.dim ||
      params.acceptor > params.dim) {
    throw std::invalid_argument("monomial_pair: indices must lie in 1..dim");
  }
  if (!(params.mu > 0.0)) {
    throw std::invalid_argument("monomial_pair: rate mu must be positive");
  }
  if (params.exponent != 1 && params.exponent != 2) {
    throw std::invalid_argument("monomial_pair: exponent must be 1 or 2");
  }
  const Eigen::Index n = params.dim;
  const Eigen::Index src = params.donor - 1;
  const Eigen::Index dst = params.acceptor - 1;
  const double mu = params.mu;
  const int kappa = params.exponent;

  std::ostringstream name;
  name.precision(17);
  name << "monomial-pair:" << params.donor << "," << params.acceptor << "," << mu << ","
       << kappa << "," << n;

  PDSystem sys;
  sys.name = name.str();
  sys.dim = n;
  sys.production = [n, src, dst, mu, kappa](const Vector& y) {
    Matrix p = Matrix::Zero(n, n);
    p(dst, src) = kappa == 1 ? mu * y[src] : mu * y[src] * y[src];
    return p;
  };
  sys.exact = [src, dst, mu, kappa](double t, const Vector& y0) {
    Vector y = y0;
    const double start = y0[src];
    const double decayed = kappa == 1 ? start * std::exp(-mu * t)
                                      : start / (1.0 + mu * t * start);
    y[src] = decayed;
    y[dst] = y0[dst] + (start - decayed);
    return y;
  };
  sys.default_initial = Vector::Ones(n);
  return sys;
}

PDSystem builtin(const std::string& id) {
  if (id == "linear") return linear_exchange();
  if (id == "nonlinear") return algal_bloom();
  if (id == "brusselator") return brusselator();
  if (id == "robertson") return robertson();
  if (id == "monomial-pair") return monomial_pair(MonomialPairParams{});
  if (id.rfind("nonlinear:", 0) == 0) {
    try {
      return algal_bloom(std::stod(id.substr(10)));
    } catch (const std::exception&) {
      throw std::invalid_argument("nonlinear id has a malformed parameter: " + id);
    }
  }
  const std::string prefix = "monomial-pair:";
  if (id.rfind(prefix, 0) == 0) {
    const auto fields = split(id.substr(prefix.size()), ',');
    if (fields.size() != 4 && fields.size() != 5) {
      throw std::invalid_argument(
          "monomial-pair id needs donor,acceptor,mu,exponent[,dim]");
    }
    MonomialPairParams params;
    try {
      params.donor = std::stoi(fields[0]);
      params.acceptor = std::stoi(fields[1]);
      params.mu = std::stod(fields[2]);
      params.exponent = std::stoi(fields[3]);
      params.dim = fields.size() == 5 ? std::stoi(fields[4])
                                      : std::max(params.donor, params.acceptor);
    } catch (const std::exception&) {
      throw std::invalid_argument("monomial-pair id has malformed parameters: " + id);
    }
    return monomial_pair(params);
  }
  throw std::invalid_argument("unknown problem id '" + id + "'");
}

}  // namespace mprk
