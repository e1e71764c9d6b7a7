#include "qlock/serialize.hpp"

namespace qlock {

namespace {

struct Parsed {
  Matrix matrix;
  Dims dims;
  Parties party;
};

Parsed parse(const nlohmann::json& j) {
  Parsed p;
  try {
    p.dims = j.at("dims").get<Dims>();
    for (const auto& label : j.at("party")) {
      p.party.push_back(party_from_string(label.get<std::string>()));
    }
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(total_dimension(p.dims));
    if (re.size() != static_cast<std::size_t>(n * n) || im.size() != re.size()) {
      throw InvalidArgument("operator JSON: entry count does not match dims");
    }
    p.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto k = static_cast<std::size_t>(r * n + c);
        p.matrix(r, c) = Complex(re[k], im[k]);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("operator JSON: ") + e.what());
  }
  return p;
}

}  // namespace

nlohmann::json to_json(const HermitianOperator& x) {
  const Matrix& m = x.matrix();
  std::vector<double> re;
  std::vector<double> im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  nlohmann::json party = nlohmann::json::array();
  for (Party p : x.party()) party.push_back(to_string(p));
  return {{"dims", x.dims()}, {"party", party}, {"re", re}, {"im", im}};
}

HermitianOperator hermitian_from_json(const nlohmann::json& j) {
  Parsed p = parse(j);
  return HermitianOperator(std::move(p.matrix), std::move(p.dims), std::move(p.party));
}

DensityOperator density_from_json(const nlohmann::json& j) {
  Parsed p = parse(j);
  return DensityOperator(std::move(p.matrix), std::move(p.dims), std::move(p.party));
}

}  // namespace qlock
