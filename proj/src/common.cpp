#include "spectest/common.hpp"

namespace spectest {

void validate(const Dataset& data) {
  if (data.X.rows() != data.y.size()) {
    throw InvalidArgument("dataset: X has " + std::to_string(data.X.rows()) +
                          " rows but y has " + std::to_string(data.y.size()) + " entries");
  }
  if (data.X.rows() == 0) throw InvalidArgument("dataset: no observations");
  if (!data.X.allFinite() || !data.y.allFinite()) {
    throw InvalidArgument("dataset: non-finite entries");
  }
}

Dataset subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.intercept = data.intercept;
  out.X.resize(static_cast<Index>(rows.size()), data.X.cols());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index r = rows[k];
    out.X.row(static_cast<Index>(k)) = data.X.row(r);
    out.y(static_cast<Index>(k)) = data.y(r);
  }
  return out;
}

}  // namespace spectest
