#include "rmdp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rmdp {

using nlohmann::json;

std::string format_double(double x) {
    if (x == NEG_INF) return "-inf";
    if (x == POS_INF) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json json_number(double x) {
    if (x == NEG_INF) return "-inf";
    if (x == POS_INF) return "inf";
    if (std::isnan(x)) return nullptr;
    return x;
}

double number_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "-inf") return NEG_INF;
        if (s == "inf") return POS_INF;
        throw ModelError("unexpected numeric string: " + s);
    }
    if (j.is_null()) return std::nan("");
    return j.get<double>();
}

std::string csv_number(double x) {
    if (x == NEG_INF || x == POS_INF) return "";
    return format_double(x);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ModelError("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

TransientMdp model_from_json(const json& j) {
    if (!j.contains("n_states") || !j.contains("n_actions") || !j.contains("transitions") ||
        !j.contains("mu"))
        throw ModelError("model JSON needs n_states, n_actions, transitions, mu");

    std::vector<Transition> ts;
    for (const auto& row : j.at("transitions")) {
        if (!row.is_array() || row.size() != 5)
            throw ModelError("each transition must be [s, a, s_next, p, r]");
        ts.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>(),
                      row[3].get<double>(), row[4].get<double>()});
    }

    std::vector<std::string> state_labels, action_labels;
    if (j.contains("labels")) {
        const auto& labels = j.at("labels");
        if (labels.contains("states"))
            state_labels = labels.at("states").get<std::vector<std::string>>();
        if (labels.contains("actions"))
            action_labels = labels.at("actions").get<std::vector<std::string>>();
    }
    std::optional<std::vector<indvec>> allowed;
    if (j.contains("allowed_actions"))
        allowed = j.at("allowed_actions").get<std::vector<indvec>>();

    return TransientMdp(j.at("n_states").get<int>(), j.at("n_actions").get<int>(),
                        std::move(ts), j.at("mu").get<numvec>(), std::move(state_labels),
                        std::move(action_labels), std::move(allowed));
}

json model_to_json(const TransientMdp& model) {
    json j;
    j["n_states"] = model.num_states();
    j["n_actions"] = model.num_actions();
    json ts = json::array();
    for (const Transition& t : model.transitions())
        ts.push_back({t.state, t.action, t.next, t.prob, t.reward});
    j["transitions"] = std::move(ts);
    j["mu"] = model.initial();
    if (!model.state_labels().empty() || !model.action_labels().empty()) {
        json labels;
        if (!model.state_labels().empty()) labels["states"] = model.state_labels();
        if (!model.action_labels().empty()) labels["actions"] = model.action_labels();
        j["labels"] = std::move(labels);
    }
    return j;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

TransientMdp load_model_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ModelError("empty model CSV");
    if (split_csv_line(line) != std::vector<std::string>{"s", "a", "s_next", "p", "r"})
        throw ModelError("model CSV must start with header s,a,s_next,p,r");

    std::vector<Transition> ts;
    int n_states = 0, n_actions = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw ModelError(path.string() + ":" + std::to_string(lineno) +
                             ": expected 5 fields");
        Transition t{std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[2]),
                     std::stod(fields[3]), std::stod(fields[4])};
        n_states = std::max({n_states, t.state + 1, t.next + 1});
        n_actions = std::max(n_actions, t.action + 1);
        ts.push_back(t);
    }

    std::filesystem::path mu_path = path.parent_path() / "mu.csv";
    std::ifstream mu_in(mu_path);
    if (!mu_in) throw ModelError("cannot open initial-distribution sidecar " + mu_path.string());
    numvec mu;
    while (std::getline(mu_in, line)) {
        if (!line.empty()) mu.push_back(std::stod(line));
    }
    return TransientMdp(n_states, n_actions, std::move(ts), std::move(mu));
}

}  // namespace

TransientMdp load_model(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return load_model_csv(path);
    return model_from_json(json::parse(read_text(path)));
}

void save_model(const TransientMdp& model, const std::filesystem::path& path) {
    if (path.extension() == ".csv") {
        std::ostringstream out;
        out << "s,a,s_next,p,r\n";
        for (const Transition& t : model.transitions())
            out << t.state << ',' << t.action << ',' << t.next << ',' << format_double(t.prob)
                << ',' << format_double(t.reward) << '\n';
        write_text_atomic(path, out.str());

        std::ostringstream mu;
        for (double m : model.initial()) mu << format_double(m) << '\n';
        write_text_atomic(path.parent_path() / "mu.csv", mu.str());
        return;
    }
    write_text_atomic(path, model_to_json(model).dump(2) + "\n");
}

json report_to_json(const SolveReport& report) {
    json j;
    j["method"] = to_string(report.method);
    j["status"] = to_string(report.status);
    j["beta"] = json_number(report.beta);
    j["objective"] = json_number(report.objective);
    json values = json::array();
    for (double v : report.value.v) values.push_back(json_number(v));
    j["value"] = std::move(values);
    j["policy"] = report.policy_actions;
    j["residual"] = json_number(report.residual);
    j["iterations"] = report.iterations;
    if (report.witness) {
        j["witness"] = {{"policy", report.witness->policy},
                        {"radius", json_number(report.witness->radius)}};
    }
    return j;
}

json evar_to_json(const EvarSolution& sol) {
    json j;
    j["alpha"] = sol.alpha;
    j["delta"] = sol.delta;
    j["beta0"] = json_number(sol.beta0);
    j["beta0_halvings"] = sol.beta0_halvings;
    j["beta_star"] = json_number(sol.beta_star);
    j["evar_lower"] = json_number(sol.evar_lower);
    j["policy"] = sol.policy_actions;
    json table = json::array();
    for (const PerBetaEntry& e : sol.per_beta)
        table.push_back({{"beta", json_number(e.beta)},
                         {"g_star", json_number(e.g_star)},
                         {"h_star", json_number(e.h_star)},
                         {"status", to_string(e.status)}});
    j["per_beta"] = std::move(table);
    return j;
}

std::string evar_per_beta_csv(const EvarSolution& sol) {
    std::ostringstream out;
    out << "beta,g_star,h_star,status\n";
    for (const PerBetaEntry& e : sol.per_beta)
        out << format_double(e.beta) << ',' << csv_number(e.g_star) << ','
            << csv_number(e.h_star) << ',' << to_string(e.status) << '\n';
    return out.str();
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::ostringstream out;
    out << "bin_low,bin_high,count\n";
    for (const HistogramBin& b : bins)
        out << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
    return out.str();
}

indvec load_policy(const std::filesystem::path& path, const TransientMdp& model) {
    json j = json::parse(read_text(path));
    json arr = j.is_array() ? j : j.at("policy");
    indvec ids = arr.get<indvec>();
    if (static_cast<int>(ids.size()) != model.num_states())
        throw ModelError("policy length " + std::to_string(ids.size()) +
                         " does not match model states");
    return ids;
}

}  // namespace rmdp
