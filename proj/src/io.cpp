#include "kvariates/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kvariates/error.hpp"

namespace kvariates {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) return cells;
        start = comma + 1;
    }
}

std::optional<double> parse_real(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

}  // namespace

Dataset parse_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t dim = 0;
    std::size_t rows = 0;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        std::vector<double> row;
        bool numeric = true;
        for (auto cell : cells) {
            const auto v = parse_real(cell);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (rows == 0 && dim == 0) {
                dim = cells.size();  // header
                continue;
            }
            throw InvalidArgument("line " + std::to_string(lineno) + ": non-numeric cell");
        }
        if (dim == 0) dim = row.size();
        if (row.size() != dim) throw InvalidArgument("line " + std::to_string(lineno) + ": ragged row");
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw InvalidArgument("empty dataset file");
    return Dataset(dim, std::move(values));
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto r = data.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof buf, r[j]);
            if (j) out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void save_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_csv(out, data);
}

Json to_json(const DatasetManifest& manifest) {
    return Json{{"path", manifest.path}, {"d", manifest.d}, {"m", manifest.m}, {"name", manifest.name}};
}

DatasetManifest manifest_from_json(const Json& j) {
    DatasetManifest out;
    out.path = j.at("path").get<std::string>();
    out.d = j.at("d").get<std::size_t>();
    out.m = j.at("m").get<std::size_t>();
    out.name = j.value("name", std::string());
    return out;
}

std::vector<DatasetManifest> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    const Json j = Json::parse(in);
    std::vector<DatasetManifest> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(manifest_from_json(e));
    } else {
        out.push_back(manifest_from_json(j));
    }
    return out;
}

const std::vector<KnownShape>& known_shapes() {
    static const std::vector<KnownShape> shapes = {
        {"LifeSci", 26733, 10},
        {"Image", 34112, 3},
        {"EuropeDiff", 169308, 2},
    };
    return shapes;
}

std::optional<KnownShape> known_shape(const std::string& name) {
    for (const auto& s : known_shapes()) {
        if (name == s.name) return s;
    }
    return std::nullopt;
}

void check_known_shape(const std::string& name, const Dataset& data) {
    const auto shape = known_shape(name);
    if (!shape) throw InvalidArgument("unknown dataset " + name);
    if (data.size() != shape->m || data.dim() != shape->d) {
        throw InvalidArgument(name + ": expected m=" + std::to_string(shape->m) + " d=" + std::to_string(shape->d) +
                              ", got m=" + std::to_string(data.size()) + " d=" + std::to_string(data.dim()));
    }
}

Json to_json(const CenterSet& centers) {
    Json list = Json::array();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& p = centers.provenance(i);
        Json c{{"coords", centers.point(i).values()}, {"iteration", p.iteration}};
        c["reference"] = p.reference ? Json(*p.reference) : Json(nullptr);
        c["source"] = p.source ? Json(*p.source) : Json(nullptr);
        c["noisy"] = p.noisy;
        list.push_back(std::move(c));
    }
    return Json{{"k", centers.size()}, {"d", centers.dim()}, {"centers", std::move(list)}};
}

Json to_json(const SpreadReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    return Json{{"delta_w", r.delta_w},
                {"delta_s", r.delta_s},
                {"R_l1", r.R_l1},
                {"R_l2_diam", r.R_l2_diam},
                {"k", r.k},
                {"method", to_string(r.method)},
                {"n_est", r.n_est},
                {"epsilon", r.epsilon},
                {"epsilon_tilde", opt(r.epsilon_tilde)},
                {"sigma1", opt(r.sigma1)},
                {"sigma2", r.sigma2}};
}

Json to_json(const MessageLog& ledger) {
    Json entries = Json::array();
    for (const auto& e : ledger.entries()) {
        entries.push_back(Json{{"iteration", e.iteration},
                               {"round", static_cast<int>(e.round)},
                               {"type", to_string(e.round)},
                               {"src", e.src},
                               {"dst", e.dst},
                               {"payload", to_string(e.payload)}});
    }
    return Json{{"special_node", ledger.special_id()},
                {"messages_round1", ledger.messages(RoundType::Request)},
                {"messages_round2", ledger.messages(RoundType::Broadcast)},
                {"messages_round3", ledger.messages(RoundType::Report)},
                {"data_points_shared", ledger.data_points_shared()},
                {"scalars_shared", ledger.scalars_shared()},
                {"special_scalar_receipts", ledger.special_scalar_receipts()},
                {"entries", std::move(entries)}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace kvariates
