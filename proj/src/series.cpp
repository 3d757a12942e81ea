#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace mpctune {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, const std::string& path, int line_no) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    std::ostringstream os;
    os << path << ":" << line_no << ": not a number: '" << s << "'";
    throw ConfigError(os.str());
  }
}

// cosine bell peaking at hour-of-day `center`, in [0, 1]
double bell(int hour_of_day, double center) {
  return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (hour_of_day - center) / 24.0));
}

}  // namespace

DisturbanceSeries DisturbanceSeries::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open series file: " + path);
  DisturbanceSeries s;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  long expect_hour = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      const std::vector<std::string> want = {"hour", "L_e", "L_cw", "L_hw", "price_e"};
      if (fields.size() != want.size()) {
        std::ostringstream os;
        os << path << ":" << line_no << ": expected header 'hour,L_e,L_cw,L_hw,price_e'";
        throw ConfigError(os.str());
      }
      for (size_t i = 0; i < want.size(); ++i) {
        if (fields[i] != want[i]) {
          std::ostringstream os;
          os << path << ":" << line_no << ": expected column '" << want[i] << "', got '"
             << fields[i] << "'";
          throw ConfigError(os.str());
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected 5 fields, got " << fields.size();
      throw ConfigError(os.str());
    }
    const long hour = static_cast<long>(parse_number(fields[0], path, line_no));
    if (expect_hour < 0) {
      expect_hour = hour;
    }
    if (hour != expect_hour) {
      std::ostringstream os;
      os << path << ":" << line_no << ": hours must be consecutive (expected " << expect_hour
         << ", got " << hour << ")";
      throw ConfigError(os.str());
    }
    ++expect_hour;
    const double le = parse_number(fields[1], path, line_no);
    const double lcw = parse_number(fields[2], path, line_no);
    const double lhw = parse_number(fields[3], path, line_no);
    const double pe = parse_number(fields[4], path, line_no);
    if (le < 0 || lcw < 0 || lhw < 0) {
      std::ostringstream os;
      os << path << ":" << line_no << ": loads must be >= 0";
      throw ConfigError(os.str());
    }
    s.load_e_.push_back(le);
    s.load_cw_.push_back(lcw);
    s.load_hw_.push_back(lhw);
    s.price_e_.push_back(pe);
  }
  if (!header_seen) throw ConfigError(path + ": missing header row");
  if (s.load_e_.empty()) throw ConfigError(path + ": no data rows");
  return s;
}

DisturbanceSeries DisturbanceSeries::from_values(std::vector<double> load_e,
                                                 std::vector<double> load_cw,
                                                 std::vector<double> load_hw,
                                                 std::vector<double> price_e) {
  const size_t n = load_e.size();
  if (n == 0) throw InputError("DisturbanceSeries: empty series");
  if (load_cw.size() != n || load_hw.size() != n || price_e.size() != n)
    throw InputError("DisturbanceSeries: mismatched vector lengths");
  for (size_t t = 0; t < n; ++t) {
    if (load_e[t] < 0 || load_cw[t] < 0 || load_hw[t] < 0)
      throw InputError("DisturbanceSeries: loads must be >= 0");
  }
  DisturbanceSeries s;
  s.load_e_ = std::move(load_e);
  s.load_cw_ = std::move(load_cw);
  s.load_hw_ = std::move(load_hw);
  s.price_e_ = std::move(price_e);
  return s;
}

DisturbanceSeries DisturbanceSeries::synthetic_desk(long hours, uint64_t seed) {
  if (hours < 1) throw InputError("synthetic_desk: hours must be >= 1");
  DisturbanceSeries s;
  s.load_e_.reserve(hours);
  s.load_cw_.reserve(hours);
  s.load_hw_.reserve(hours);
  s.price_e_.reserve(hours);
  Rng rng(derive_seed(seed, 77));
  for (long t = 0; t < hours; ++t) {
    const int hod = static_cast<int>(t % 24);
    const int dow = static_cast<int>((t / 24) % 7);
    const bool weekend = dow >= 5;
    const double wk = weekend ? 0.8 : 1.0;
    const double j1 = std::exp(0.04 * rng.normal());
    const double j2 = std::exp(0.04 * rng.normal());
    const double j3 = std::exp(0.04 * rng.normal());
    s.load_cw_.push_back((180.0 + 340.0 * bell(hod, 15.0)) * wk * j1);
    s.load_hw_.push_back((150.0 + 220.0 * bell(hod, 7.0)) * wk * j2);
    s.load_e_.push_back((500.0 + 280.0 * bell(hod, 14.0)) * wk * j3);
    const double peak_amp = weekend ? 0.02 : 0.075;
    s.price_e_.push_back(0.045 + peak_amp * bell(hod, 16.0));
  }
  return s;
}

void DisturbanceSeries::derive_forecasts(double noise_std, uint64_t seed) {
  if (noise_std < 0) throw InputError("derive_forecasts: noise_std must be >= 0");
  const long n = hours();
  const std::vector<double>* realized[4] = {&load_e_, &load_cw_, &load_hw_, &price_e_};
  std::vector<double>* forecast[4] = {&fc_load_e_, &fc_load_cw_, &fc_load_hw_, &fc_price_e_};
  for (int sidx = 0; sidx < 4; ++sidx) {
    forecast[sidx]->resize(n);
    if (noise_std == 0.0) {
      *forecast[sidx] = *realized[sidx];
      continue;
    }
    Rng rng(derive_seed(seed, 200 + sidx));
    for (long t = 0; t < n; ++t) {
      const double eps = std::clamp(noise_std * rng.normal(), -0.45, 0.45);
      (*forecast[sidx])[t] = (*realized[sidx])[t] / (1.0 + eps);
    }
  }
}

ForecastWindow DisturbanceSeries::window(long t, int horizon) const {
  if (!has_forecasts()) throw InputError("DisturbanceSeries: forecasts not derived");
  if (t < 0 || t + horizon > hours()) {
    std::ostringstream os;
    os << "forecast window [" << t << ", " << t + horizon << ") exceeds series span " << hours();
    throw DomainError(os.str());
  }
  ForecastWindow w;
  w.load_e.resize(horizon);
  w.load_cw.resize(horizon);
  w.load_hw.resize(horizon);
  w.price_e.resize(horizon);
  for (int k = 0; k < horizon; ++k) {
    w.load_e(k) = fc_load_e_[t + k];
    w.load_cw(k) = fc_load_cw_[t + k];
    w.load_hw(k) = fc_load_hw_[t + k];
    w.price_e(k) = fc_price_e_[t + k];
  }
  return w;
}

HourData DisturbanceSeries::realized(long t) const {
  if (t < 0 || t >= hours()) throw DomainError("realized hour out of range");
  return {load_e_[t], load_cw_[t], load_hw_[t], price_e_[t]};
}

void DisturbanceSeries::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write series file: " + path);
  out << "hour,L_e,L_cw,L_hw,price_e\n";
  for (long t = 0; t < hours(); ++t) {
    out << t << "," << fmt_double(load_e_[t]) << "," << fmt_double(load_cw_[t]) << ","
        << fmt_double(load_hw_[t]) << "," << fmt_double(price_e_[t]) << "\n";
  }
}

uint64_t DisturbanceSeries::content_hash() const {
  // FNV-1a over the raw bit patterns
  uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](const std::vector<double>& v) {
    for (const double d : v) {
      uint64_t bits;
      std::memcpy(&bits, &d, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffull;
        h *= 0x100000001b3ull;
      }
    }
  };
  mix(load_e_);
  mix(load_cw_);
  mix(load_hw_);
  mix(price_e_);
  return h;
}

}  // namespace mpctune
