#include "hspg/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hspg/rng.hpp"

namespace hspg {

SyntheticInstance gen_synthetic(std::size_t num_instances, std::size_t dim,
                                std::size_t num_groups, double sparsity_ratio,
                                std::uint64_t seed) {
  if (num_instances == 0 || dim == 0)
    throw std::invalid_argument("gen_synthetic: zero dimensions");
  if (!(sparsity_ratio >= 0.0 && sparsity_ratio <= 1.0))
    throw std::invalid_argument("gen_synthetic: sparsity_ratio outside [0,1]");
  GroupPartition partition = make_equal_partition(dim, num_groups);

  // independent substreams: 0 = A, 1 = x*, 2 = zero-group choice
  auto eng_a = make_engine(seed, 0);
  RowMatrixXd A(num_instances, dim);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = uniform_pm1(eng_a);

  auto eng_x = make_engine(seed, 1);
  Eigen::VectorXd x_star(dim);
  for (Eigen::Index j = 0; j < x_star.size(); ++j) x_star[j] = uniform_pm1(eng_x);

  auto eng_z = make_engine(seed, 2);
  const std::size_t num_zero =
      static_cast<std::size_t>(std::llround(sparsity_ratio * static_cast<double>(num_groups)));
  std::vector<std::size_t> ids(num_groups);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  shuffle(ids, eng_z);
  std::vector<std::size_t> zero_groups(ids.begin(), ids.begin() + num_zero);
  std::sort(zero_groups.begin(), zero_groups.end());
  for (const std::size_t g : zero_groups) {
    const auto& r = partition.group(g);
    x_star.segment(static_cast<Eigen::Index>(r.start), static_cast<Eigen::Index>(r.length))
        .setZero();
  }

  SyntheticInstance inst{std::move(A), Eigen::VectorXd(), Parameters(std::move(x_star)),
                         std::move(zero_groups), std::move(partition)};
  inst.y = inst.A * inst.x_star.x;
  return inst;
}

void dump_synthetic(const SyntheticInstance& inst, std::ostream& os) {
  char buf[32];
  os << inst.A.rows() << ' ' << inst.A.cols() << ' ' << inst.partition.num_groups();
  for (const std::size_t g : inst.true_zero_groups) os << ' ' << g;
  os << '\n';
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (Eigen::Index i = 0; i < inst.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < inst.A.cols(); ++j) {
      if (j) os << ' ';
      put(inst.A(i, j));
    }
    os << '\n';
  }
  for (Eigen::Index j = 0; j < inst.x_star.x.size(); ++j) {
    if (j) os << ' ';
    put(inst.x_star.x[j]);
  }
  os << '\n';
  for (Eigen::Index i = 0; i < inst.y.size(); ++i) {
    if (i) os << ' ';
    put(inst.y[i]);
  }
  os << '\n';
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("libsvm parse error at line " + std::to_string(line_no) + ": " +
                           what);
}

double parse_double(const char* begin, const char* end, std::size_t line_no) {
  const char* p = begin;
  if (p < end && *p == '+') ++p;  // from_chars rejects an explicit plus
  double v = 0.0;
  const auto res = std::from_chars(p, end, v);
  if (p == end || res.ec != std::errc() || res.ptr != end)
    parse_fail(line_no, "malformed number '" + std::string(begin, end) + "'");
  return v;
}

}  // namespace

LibsvmData parse_libsvm(std::istream& is, std::size_t min_dimension) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  std::size_t max_index = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();  // CRLF input
    std::size_t pos = 0;
    const auto skip_ws = [&] {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    };
    const auto next_token = [&]() -> std::string_view {
      skip_ws();
      const std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      return std::string_view(line).substr(start, pos - start);
    };
    const auto label_tok = next_token();
    if (label_tok.empty()) continue;  // blank line
    const double raw_label =
        parse_double(label_tok.data(), label_tok.data() + label_tok.size(), line_no);
    const std::size_t row = labels.size();
    labels.push_back(raw_label > 0.0 ? 1.0 : -1.0);

    std::size_t prev_index = 0;
    while (true) {
      const auto tok = next_token();
      if (tok.empty()) break;
      const std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        parse_fail(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      std::size_t index = 0;
      const auto ires = std::from_chars(tok.data(), tok.data() + colon, index);
      if (ires.ec != std::errc() || ires.ptr != tok.data() + colon)
        parse_fail(line_no, "malformed index '" + std::string(tok.substr(0, colon)) + "'");
      if (index < 1) parse_fail(line_no, "index < 1");
      if (index <= prev_index) parse_fail(line_no, "indices not strictly increasing");
      prev_index = index;
      const double value =
          parse_double(tok.data() + colon + 1, tok.data() + tok.size(), line_no);
      max_index = std::max(max_index, index);
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(index - 1), value);
    }
  }
  const std::size_t dim = std::max(max_index, min_dimension);
  LibsvmData out;
  out.features.resize(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(dim));
  out.features.setFromTriplets(triplets.begin(), triplets.end());
  out.features.makeCompressed();
  out.labels = Eigen::Map<Eigen::VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  return out;
}

LogisticProblem load_libsvm_problem(const std::string& path, std::size_t min_dimension,
                                    bool with_bias) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  LibsvmData d = parse_libsvm(in, min_dimension);
  if (d.labels.size() == 0) throw std::runtime_error("no instances in " + path);
  if (d.features.cols() == 0) throw std::runtime_error("no features in " + path);
  return LogisticProblem(std::move(d.features), std::move(d.labels), with_bias);
}

void serialize_libsvm(const LogisticProblem& problem, std::ostream& os) {
  char buf[32];
  const auto& D = problem.features();
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    os << (problem.labels()[i] > 0.0 ? "+1" : "-1");
    for (SparseRowMatrix::InnerIterator it(D, i); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << ' ' << (it.index() + 1) << ':' << buf;
    }
    os << '\n';
  }
}

std::vector<std::size_t> BatchSchedule::permutation(std::size_t epoch) const {
  std::vector<std::size_t> perm(num_instances);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto eng = make_engine(seed, 0x9000 + epoch);
  shuffle(perm, eng);
  return perm;
}

std::vector<std::size_t> next_batch(const BatchSchedule& schedule, std::size_t epoch,
                                    std::size_t step) {
  if (step >= schedule.num_batches())
    throw std::invalid_argument("next_batch: step outside epoch bounds");
  const auto perm = schedule.permutation(epoch);
  const std::size_t begin = step * schedule.batch_size;
  const std::size_t end = std::min(begin + schedule.batch_size, schedule.num_instances);
  return std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                                  perm.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace hspg
