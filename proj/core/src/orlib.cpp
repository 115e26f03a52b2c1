#include "halftrack/orlib.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "halftrack/log.hpp"

namespace halftrack {

OrlibLayout parse_layout(const std::string& name) {
  if (name == "period-index-first") return OrlibLayout::period_index_first;
  if (name == "period-index-last") return OrlibLayout::period_index_last;
  if (name == "series-index-first") return OrlibLayout::series_index_first;
  if (name == "series-index-last") return OrlibLayout::series_index_last;
  throw ValidationError("unknown layout: " + name);
}

std::string layout_name(OrlibLayout layout) {
  switch (layout) {
    case OrlibLayout::period_index_first: return "period-index-first";
    case OrlibLayout::period_index_last: return "period-index-last";
    case OrlibLayout::series_index_first: return "series-index-first";
    case OrlibLayout::series_index_last: return "series-index-last";
  }
  return "?";
}

namespace {

double parse_price(const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw MalformedNumber("not a number: '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v))
    throw MalformedNumber("not a finite number: '" + tok + "'");
  return v;
}

long parse_header_int(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw TokenCountMismatch(std::string("missing header token ") + what);
  long v = 0;
  std::size_t pos = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw MalformedNumber(std::string("bad header token ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size())
    throw MalformedNumber(std::string("bad header token ") + what + ": '" + tok + "'");
  if (v <= 0) throw TokenCountMismatch(std::string(what) + " must be positive");
  return v;
}

}  // namespace

PricePanel parse_orlib(std::istream& in, OrlibLayout layout,
                       const std::string& source_name) {
  const long n = parse_header_int(in, "N");
  const long tp = parse_header_int(in, "T_p");
  if (n < 2) throw TokenCountMismatch("need at least 2 stocks");
  if (tp < 3) throw TokenCountMismatch("need at least 3 periods");

  const std::size_t expected = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(tp);
  std::vector<double> tokens;
  tokens.reserve(expected);
  std::string tok;
  while (in >> tok) {
    if (tokens.size() == expected) {
      std::ostringstream os;
      os << "expected " << expected << " price tokens, found more";
      throw TokenCountMismatch(os.str());
    }
    const double v = parse_price(tok);
    if (v <= 0.0) throw NonPositivePrice("non-positive price: " + tok);
    tokens.push_back(v);
  }
  if (tokens.size() != expected) {
    std::ostringstream os;
    os << "expected " << expected << " price tokens, found " << tokens.size();
    throw TokenCountMismatch(os.str());
  }

  PricePanel panel;
  panel.source_name = source_name;
  panel.index_prices.resize(tp);
  panel.stock_prices.resize(tp, n);

  // series index: 0 = the index itself, 1..N = stocks.
  auto value_at = [&](long series, long t) -> double {
    switch (layout) {
      case OrlibLayout::period_index_first:
        return tokens[static_cast<std::size_t>(t) * (n + 1) + series];
      case OrlibLayout::period_index_last: {
        const long col = (series == 0) ? n : series - 1;
        return tokens[static_cast<std::size_t>(t) * (n + 1) + col];
      }
      case OrlibLayout::series_index_first:
        return tokens[static_cast<std::size_t>(series) * tp + t];
      case OrlibLayout::series_index_last: {
        const long row = (series == 0) ? n : series - 1;
        return tokens[static_cast<std::size_t>(row) * tp + t];
      }
    }
    return 0.0;
  };

  for (long t = 0; t < tp; ++t) {
    panel.index_prices[t] = value_at(0, t);
    for (long i = 0; i < n; ++i) panel.stock_prices(t, i) = value_at(i + 1, t);
  }

  // A stock series that exactly duplicates the index usually means the
  // layout flag is wrong for this file. Warn, never fail.
  for (long i = 0; i < n; ++i) {
    if ((panel.stock_prices.col(i).array() == panel.index_prices.array()).all()) {
      log::warn("stock ", i + 1, " duplicates the index series; check --layout (",
                layout_name(layout), ") against the archive readme");
      break;
    }
  }
  return panel;
}

PricePanel parse_orlib_file(const std::string& path, OrlibLayout layout) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open " + path);
  return parse_orlib(in, layout, path);
}

ReturnsData to_returns(const PricePanel& panel) {
  const Index t = panel.n_periods() - 1;
  const Index n = panel.n_stocks();
  ReturnsData data;
  data.stock_returns.resize(t, n);
  data.index_returns.resize(t);
  for (Index row = 0; row < t; ++row) {
    data.index_returns[row] =
        (panel.index_prices[row + 1] - panel.index_prices[row]) / panel.index_prices[row];
    for (Index i = 0; i < n; ++i) {
      const double p0 = panel.stock_prices(row, i);
      const double p1 = panel.stock_prices(row + 1, i);
      data.stock_returns(row, i) = (p1 - p0) / p0;
    }
  }
  data.train_rows = t;
  data.test_rows = 0;
  return data;
}

ReturnsData split(const ReturnsData& data, Index train_count) {
  const Index t = data.n_periods();
  if (train_count < 1 || train_count > t - 1) {
    std::ostringstream os;
    os << "train_count " << train_count << " out of range [1, " << t - 1 << "]";
    throw BadSplit(os.str());
  }
  ReturnsData out = data;
  out.train_rows = train_count;
  out.test_rows = t - train_count;
  return out;
}

ReturnsData split_half(const ReturnsData& data) {
  return split(data, data.n_periods() / 2);
}

}  // namespace halftrack
