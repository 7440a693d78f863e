#include "domainrisk/features.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <type_traits>

namespace drisk {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Distinct values over a prefix, via linear scan: prefixes are short and the
// value sets tiny, so this beats hashing and allocates almost nothing.
// Pointer projections are compared through the pointee.
template <typename Snap, typename Proj>
double count_distinct(std::span<const Snap> xs, Proj proj) {
  using V = std::decay_t<decltype(proj(xs[0]))>;
  std::vector<V> seen;
  for (const auto& s : xs) {
    V v = proj(s);
    auto eq = [&](const V& w) {
      if constexpr (std::is_pointer_v<V>)
        return *w == *v;
      else
        return w == v;
    };
    if (std::find_if(seen.begin(), seen.end(), eq) == seen.end()) seen.push_back(v);
  }
  return static_cast<double>(seen.size());
}

template <typename Snap, typename Proj>
double count_distinct_present(std::span<const Snap> xs, Proj proj) {
  std::vector<Date> seen;
  for (const auto& s : xs) {
    auto v = proj(s);
    if (!v) continue;
    if (std::find(seen.begin(), seen.end(), *v) == seen.end()) seen.push_back(*v);
  }
  return static_cast<double>(seen.size());
}

// Records whose content differs from their predecessor — the dates a field
// actually changed rather than the poll cadence. All "since last update",
// gap and latest-vs-previous families run over this subsequence, so a daily
// poll of an unchanged domain contributes nothing.
template <typename Snap>
std::vector<const Snap*> change_events(std::span<const Snap> prefix) {
  std::vector<const Snap*> out;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (i == 0 || !prefix[i].content_equals(prefix[i - 1])) out.push_back(&prefix[i]);
  return out;
}

struct GapStats {
  double min = kMissing, mean = kMissing, median = kMissing, max = kMissing;
};

template <typename Snap>
GapStats gap_stats(const std::vector<const Snap*>& events) {
  if (events.size() < 2) return {};
  std::vector<int> gaps;
  gaps.reserve(events.size() - 1);
  for (std::size_t i = 1; i < events.size(); ++i)
    gaps.push_back(events[i]->observed_at - events[i - 1]->observed_at);
  GapStats g;
  g.min = *std::min_element(gaps.begin(), gaps.end());
  g.max = *std::max_element(gaps.begin(), gaps.end());
  double sum = 0;
  for (int v : gaps) sum += v;
  g.mean = sum / static_cast<double>(gaps.size());
  std::sort(gaps.begin(), gaps.end());
  std::size_t n = gaps.size();
  g.median = (n % 2) ? gaps[n / 2] : (gaps[n / 2 - 1] + gaps[n / 2]) / 2.0;
  return g;
}

double day_diff(const std::optional<Date>& latest, const std::optional<Date>& prev) {
  if (!latest || !prev) return kMissing;
  return *latest - *prev;
}

// Slot in the one-hot block, or -1 for an empty status set.
int primary_status_slot(const std::vector<std::string>& statuses) {
  if (statuses.empty()) return -1;
  const auto& vocab = status_vocabulary();
  for (int i = 0; i < 13; ++i)
    for (const auto& s : statuses)
      if (iequals(s, vocab[i])) return i;
  return 13;  // "other"
}

}  // namespace

const std::array<std::string, 14>& status_vocabulary() {
  static const std::array<std::string, 14> vocab = {
      "ok",
      "inactive",
      "clientHold",
      "serverHold",
      "clientTransferProhibited",
      "serverTransferProhibited",
      "clientDeleteProhibited",
      "serverDeleteProhibited",
      "clientUpdateProhibited",
      "serverUpdateProhibited",
      "pendingDelete",
      "redemptionPeriod",
      "autoRenewPeriod",
      "other",
  };
  return vocab;
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      // WHOIS
      "w1_reg_uniq", "w1_created_uniq", "w1_expiry_uniq", "w1_status_uniq",
      "w2_since_created", "w2_until_expiry", "w2_since_updated",
      "w3_status_ok", "w3_status_inactive", "w3_status_clienthold", "w3_status_serverhold",
      "w3_status_clientxferprohib", "w3_status_serverxferprohib", "w3_status_clientdelprohib",
      "w3_status_serverdelprohib", "w3_status_clientupdprohib", "w3_status_serverupdprohib",
      "w3_status_pendingdelete", "w3_status_redemption", "w3_status_autorenew",
      "w3_status_other",
      "w4_gap_min", "w4_gap_mean", "w4_gap_median", "w4_gap_max",
      "w5_updated_diff", "w5_created_diff", "w5_expiry_diff",
      "w6_reg_chg", "w6_status_chg",
      // SOA
      "s7_mname_uniq", "s7_rname_uniq", "s7_serial_uniq",
      "s8_since_update",
      "s9_gap_min", "s9_gap_mean", "s9_gap_median", "s9_gap_max",
      "s10_last_gap",
      "s11_mname_chg", "s11_rname_chg",
      // TLS
      "t12_issuer_c_uniq", "t12_issuer_cn_uniq", "t12_issuer_o_uniq",
      "t12_notbefore_uniq", "t12_notafter_uniq", "t12_subjcn_uniq",
      "t13_since_notbefore", "t13_until_notafter",
      "t14_gap_min", "t14_gap_mean", "t14_gap_median", "t14_gap_max",
      "t15_notbefore_diff", "t15_notafter_diff",
      "t16_issuer_c_chg", "t16_issuer_cn_chg", "t16_issuer_o_chg", "t16_subjcn_chg",
  };
  return names;
}

std::optional<FeatureSetSelector> FeatureSetSelector::parse(std::string_view text) {
  FeatureSetSelector sel{false, false, false};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find('+', pos);
    std::string_view tok = text.substr(pos, next == std::string_view::npos ? next : next - pos);
    if (tok == "all")
      sel.whois = sel.soa = sel.tls = true;
    else if (tok == "whois")
      sel.whois = true;
    else if (tok == "soa")
      sel.soa = true;
    else if (tok == "tls")
      sel.tls = true;
    else
      return std::nullopt;
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (!sel.any()) return std::nullopt;
  return sel;
}

std::string FeatureSetSelector::to_string() const {
  if (whois && soa && tls) return "all";
  std::string out;
  for (auto [on, name] : {std::pair{whois, "whois"}, std::pair{soa, "soa"}, std::pair{tls, "tls"}}) {
    if (!on) continue;
    if (!out.empty()) out += '+';
    out += name;
  }
  return out.empty() ? "none" : out;
}

std::vector<std::string> selected_feature_names(FeatureSetSelector sel) {
  const auto& all = feature_names();
  std::vector<std::string> out;
  out.reserve(sel.dims());
  if (sel.whois)
    for (int i = 0; i < kWhoisDims; ++i) out.push_back(all[i]);
  if (sel.soa)
    for (int i = 0; i < kSoaDims; ++i) out.push_back(all[kWhoisDims + i]);
  if (sel.tls)
    for (int i = 0; i < kTlsDims; ++i) out.push_back(all[kWhoisDims + kSoaDims + i]);
  return out;
}

FeatureVector extract_features(const EvaluationPoint& point) {
  FeatureVector f{};
  const Date t = point.t;

  // ---- WHOIS block (dims 0..29) ----
  {
    auto W = point.visible_whois;
    f[0] = count_distinct(W, [](const WhoisSnapshot& s) { return &s.registrar; });
    f[1] = count_distinct_present(W, [](const WhoisSnapshot& s) { return s.creation_date; });
    f[2] = count_distinct_present(W, [](const WhoisSnapshot& s) { return s.expiry_date; });
    f[3] = count_distinct(W, [](const WhoisSnapshot& s) { return &s.statuses; });
    if (W.empty()) {
      f[4] = f[5] = f[6] = kMissing;
    } else {
      const auto& last = W.back();
      f[4] = last.creation_date ? t - *last.creation_date : kMissing;
      f[5] = last.expiry_date ? *last.expiry_date - t : kMissing;
      f[6] = last.updated_date ? t - *last.updated_date : kMissing;
      if (int slot = primary_status_slot(last.statuses); slot >= 0) f[7 + slot] = 1.0;
    }
    auto wc = change_events(W);
    GapStats g = gap_stats(wc);
    f[21] = g.min;
    f[22] = g.mean;
    f[23] = g.median;
    f[24] = g.max;
    if (wc.size() >= 2) {
      const auto& prev = *wc[wc.size() - 2];
      const auto& last = *wc.back();
      f[25] = day_diff(last.updated_date, prev.updated_date);
      f[26] = day_diff(last.creation_date, prev.creation_date);
      f[27] = day_diff(last.expiry_date, prev.expiry_date);
      f[28] = last.registrar != prev.registrar ? 1.0 : 0.0;
      f[29] = last.statuses != prev.statuses ? 1.0 : 0.0;
    } else {
      f[25] = f[26] = f[27] = kMissing;
    }
  }

  // ---- SOA block (dims 30..40) ----
  {
    auto S = point.visible_soa;
    f[30] = count_distinct(S, [](const SoaSnapshot& s) { return &s.mname; });
    f[31] = count_distinct(S, [](const SoaSnapshot& s) { return &s.rname; });
    f[32] = count_distinct(S, [](const SoaSnapshot& s) { return s.serial; });
    auto sc = change_events(S);
    f[33] = sc.empty() ? kMissing : t - sc.back()->observed_at;
    GapStats g = gap_stats(sc);
    f[34] = g.min;
    f[35] = g.mean;
    f[36] = g.median;
    f[37] = g.max;
    if (sc.size() >= 2) {
      const auto& prev = *sc[sc.size() - 2];
      const auto& last = *sc.back();
      f[38] = last.observed_at - prev.observed_at;
      f[39] = last.mname != prev.mname ? 1.0 : 0.0;
      f[40] = last.rname != prev.rname ? 1.0 : 0.0;
    } else {
      f[38] = kMissing;
    }
  }

  // ---- TLS block (dims 41..58) ----
  {
    auto T = point.visible_tls;
    f[41] = count_distinct(T, [](const TlsSnapshot& s) { return &s.issuer_c; });
    f[42] = count_distinct(T, [](const TlsSnapshot& s) { return &s.issuer_cn; });
    f[43] = count_distinct(T, [](const TlsSnapshot& s) { return &s.issuer_o; });
    f[44] = count_distinct(T, [](const TlsSnapshot& s) { return s.not_before; });
    f[45] = count_distinct(T, [](const TlsSnapshot& s) { return s.not_after; });
    f[46] = count_distinct(T, [](const TlsSnapshot& s) { return &s.subject_cn; });
    if (T.empty()) {
      f[47] = f[48] = kMissing;
    } else {
      f[47] = t - T.back().not_before;
      f[48] = T.back().not_after - t;
    }
    auto tc = change_events(T);
    GapStats g = gap_stats(tc);
    f[49] = g.min;
    f[50] = g.mean;
    f[51] = g.median;
    f[52] = g.max;
    if (tc.size() >= 2) {
      const auto& prev = *tc[tc.size() - 2];
      const auto& last = *tc.back();
      f[53] = last.not_before - prev.not_before;
      f[54] = last.not_after - prev.not_after;
      f[55] = last.issuer_c != prev.issuer_c ? 1.0 : 0.0;
      f[56] = last.issuer_cn != prev.issuer_cn ? 1.0 : 0.0;
      f[57] = last.issuer_o != prev.issuer_o ? 1.0 : 0.0;
      f[58] = last.subject_cn != prev.subject_cn ? 1.0 : 0.0;
    } else {
      f[53] = f[54] = kMissing;
    }
  }

  return f;
}

std::vector<double> project(const FeatureVector& full, FeatureSetSelector sel) {
  if (!sel.any()) throw std::invalid_argument("feature selector picks no block");
  std::vector<double> out;
  out.reserve(sel.dims());
  if (sel.whois) out.insert(out.end(), full.begin(), full.begin() + kWhoisDims);
  if (sel.soa)
    out.insert(out.end(), full.begin() + kWhoisDims, full.begin() + kWhoisDims + kSoaDims);
  if (sel.tls) out.insert(out.end(), full.begin() + kWhoisDims + kSoaDims, full.end());
  return out;
}

}  // namespace drisk
