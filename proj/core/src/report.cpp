#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/eval.hpp"

namespace cervix {

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::text;
  if (text == "tsv") return ReportFormat::tsv;
  if (text == "svg") return ReportFormat::svg;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string validation_label(int k) { return std::to_string(k) + "-fold"; }

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view task_title(LabelScheme s) {
  return s == LabelScheme::binary ? "Normal vs abnormal classification" : "Type 1 / Type 2 / Type 3 classification";
}

std::string_view metric_convention(LabelScheme s) {
  return s == LabelScheme::binary
             ? "positive class: abnormal; sensitivity = TP/(TP+FN), specificity = TN/(TN+FP)"
             : "sensitivity and specificity are macro-averaged one-vs-rest over the three types; accuracy = trace/total";
}

void require_rows(const MetricsReport& report) {
  if (report.rows.empty()) throw std::invalid_argument("report has no rows");
}

}  // namespace

std::string format_tsv(const MetricsReport& report) {
  require_rows(report);
  std::string out = "validation\tvariant\tspecificity\tsensitivity\taccuracy\n";
  for (const auto& r : report.rows) {
    out += validation_label(r.k) + '\t' + std::string(pipeline_variant_name(r.variant)) + '\t' +
           fixed2(r.metrics.specificity) + '\t' + fixed2(r.metrics.sensitivity) + '\t' + fixed2(r.metrics.accuracy) + '\n';
  }
  return out;
}

std::string format_text(const MetricsReport& report, std::string_view provenance) {
  require_rows(report);
  std::ostringstream os;
  os << task_title(report.scheme) << "\n";
  os << "metrics: " << metric_convention(report.scheme) << "\n";
  os << "aggregation: " << (report.per_fold_mean ? "mean of per-fold metrics" : "pooled confusion matrix over folds")
     << "\n\n";
  os << pad("Validation", 12) << pad("Features", 42) << pad("Spec.(%)", 10) << pad("Sen.(%)", 10) << "Acc.(%)\n";
  int last_k = -1;
  for (const auto& r : report.rows) {
    if (r.k != last_k && last_k != -1) os << "\n";
    os << pad(r.k != last_k ? validation_label(r.k) : "", 12) << pad(std::string(pipeline_variant_title(r.variant)), 42)
       << pad(fixed2(r.metrics.specificity), 10) << pad(fixed2(r.metrics.sensitivity), 10) << fixed2(r.metrics.accuracy);
    if (r.metrics.zero_denominator) os << "  (warning: empty denominator set to 0)";
    os << "\n";
    last_k = r.k;
  }
  if (!provenance.empty()) {
    os << "\n# resolved configuration\n";
    std::istringstream lines{std::string(provenance)};
    std::string line;
    while (std::getline(lines, line)) os << "# " << line << "\n";
  }
  return os.str();
}

std::string format_svg(const MetricsReport& report, std::string_view provenance) {
  require_rows(report);
  constexpr int bar_w = 18;
  constexpr int group_gap = 30;
  constexpr int group_w = 3 * bar_w + group_gap;
  constexpr int left = 60;
  constexpr int top = 50;
  constexpr int plot_h = 300;
  constexpr int bottom = 110;
  const int width = left + static_cast<int>(report.rows.size()) * group_w + 160;
  const int height = top + plot_h + bottom;
  static constexpr const char* colors[3] = {"#4c72b0", "#dd8452", "#55a868"};
  static constexpr const char* names[3] = {"Specificity", "Sensitivity", "Accuracy"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
     << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<title>" << xml_escape(task_title(report.scheme)) << "</title>\n";
  os << "<desc>" << xml_escape(metric_convention(report.scheme)) << "</desc>\n";
  if (!provenance.empty()) os << "<metadata>" << xml_escape(provenance) << "</metadata>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << xml_escape(task_title(report.scheme)) << "</text>\n";

  // Axis with gridlines every 20 percent.
  for (int p = 0; p <= 100; p += 20) {
    const int y = top + plot_h - plot_h * p / 100;
    os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << width - 150 << "\" y2=\"" << y
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << p << "</text>\n";
  }
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";

  for (std::size_t g = 0; g < report.rows.size(); ++g) {
    const auto& r = report.rows[g];
    const double values[3] = {r.metrics.specificity, r.metrics.sensitivity, r.metrics.accuracy};
    const int gx = left + group_gap / 2 + static_cast<int>(g) * group_w;
    os << "<g class=\"group\">\n";
    for (int b = 0; b < 3; ++b) {
      const double h = plot_h * values[b] / 100.0;
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "<rect class=\"bar\" x=\"%d\" y=\"%.2f\" width=\"%d\" height=\"%.2f\" fill=\"%s\"><title>%s %s</title></rect>\n",
                    gx + b * bar_w, top + plot_h - h, bar_w - 2, h, colors[b], names[b], fixed2(values[b]).c_str());
      os << buf;
    }
    const int cx = gx + 3 * bar_w / 2;
    os << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">"
       << xml_escape(validation_label(r.k)) << "</text>\n";
    os << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 30 << "\" text-anchor=\"middle\">"
       << xml_escape(pipeline_variant_name(r.variant)) << "</text>\n";
    os << "</g>\n";
  }
  for (int b = 0; b < 3; ++b) {
    const int ly = top + 10 + b * 18;
    os << "<rect x=\"" << width - 140 << "\" y=\"" << ly << "\" width=\"12\" height=\"12\" fill=\"" << colors[b]
       << "\"/>\n";
    os << "<text x=\"" << width - 122 << "\" y=\"" << ly + 10 << "\">" << names[b] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

MetricsReport parse_tsv(const std::string& text, LabelScheme scheme) {
  MetricsReport report;
  report.scheme = scheme;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "validation\tvariant\tspecificity\tsensitivity\taccuracy")
        throw DataError("metrics TSV has an unexpected header");
      continue;
    }
    std::istringstream fields(line);
    std::string validation, variant, spec, sen, acc;
    if (!std::getline(fields, validation, '\t') || !std::getline(fields, variant, '\t') ||
        !std::getline(fields, spec, '\t') || !std::getline(fields, sen, '\t') || !std::getline(fields, acc))
      throw DataError("metrics TSV line " + std::to_string(line_no) + " has too few fields");
    ReportRow row;
    try {
      const auto dash = validation.find("-fold");
      if (dash == std::string::npos) throw std::invalid_argument("validation");
      row.k = std::stoi(validation.substr(0, dash));
      row.variant = parse_pipeline_variant(variant);
      row.metrics.specificity = std::stod(spec);
      row.metrics.sensitivity = std::stod(sen);
      row.metrics.accuracy = std::stod(acc);
    } catch (const std::exception&) {
      throw DataError("metrics TSV line " + std::to_string(line_no) + " is malformed");
    }
    row.pooled = ConfusionMatrix(class_count(scheme));
    report.rows.push_back(std::move(row));
  }
  return report;
}

void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& out,
                 std::string_view provenance) {
  switch (format) {
    case ReportFormat::text: io::write_file_atomic(out, format_text(report, provenance)); break;
    case ReportFormat::tsv: io::write_file_atomic(out, format_tsv(report)); break;
    case ReportFormat::svg: io::write_file_atomic(out, format_svg(report, provenance)); break;
  }
}

}  // namespace cervix
