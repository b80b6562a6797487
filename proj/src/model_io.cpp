#include "pfdde/model_io.hpp"

#include <fstream>
#include <sstream>

#include "pfdde/errors.hpp"

namespace pfdde {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ValidationError(std::string("model document lacks key '") + key + "'");
    return *it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
    return j.get<double>();
}

Eigen::MatrixXd matrix_from_json(const json& j, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ValidationError("matrix must have n rows");
    Eigen::MatrixXd A(n, n);
    for (int r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
            throw ValidationError("matrix row must have n entries");
        for (int c = 0; c < n; ++c) A(r, c) = number(j[r][c], "matrix entry");
    }
    return A;
}

std::optional<MultilinearStencil> stencil_from_json(const json& doc, const char* key, int order,
                                                    int n, std::optional<double> period) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    if (!it->is_array()) throw ValidationError(std::string(key) + " must be a list of terms");
    MultilinearStencil st;
    st.order = order;
    for (const auto& tj : *it) {
        if (!tj.is_object()) throw ValidationError(std::string(key) + " term must be an object");
        StencilTerm term;
        const auto& slots = require(tj, "slots");
        if (!slots.is_array()) throw ValidationError("slots must be a list");
        for (const auto& sj : slots) {
            if (!sj.is_array() || sj.size() != 2)
                throw ValidationError("slot must be [delay, component]");
            if (!sj[1].is_number_integer()) throw ValidationError("slot component must be an integer");
            term.slots.push_back({number(sj[0], "slot delay"), sj[1].get<int>()});
        }
        term.coeff = vector_series_from_json(require(tj, "coeff"), n, period);
        term.real = tj.value("real", true);
        st.terms.push_back(std::move(term));
    }
    return st;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw ValidationError("complex value must be [re, im]");
    return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

json series_to_json(const FourierSeries& s, Eigen::Index component) {
    json modes = json::array();
    for (const auto& [m, c] : s.modes())
        modes.push_back(json::array({m, c(component).real(), c(component).imag()}));
    return modes;
}

json vector_series_to_json(const FourierSeries& s) {
    json out = json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i) out.push_back(series_to_json(s, i));
    return out;
}

FourierSeries vector_series_from_json(const json& j, Eigen::Index dim, std::optional<double> period) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim)
        throw ValidationError("coefficient needs one mode list per component");
    FourierSeries s(dim, period);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto& modes = j[static_cast<std::size_t>(i)];
        if (!modes.is_array()) throw ValidationError("mode list must be an array");
        for (const auto& mj : modes) {
            if (!mj.is_array() || mj.size() != 3 || !mj[0].is_number_integer())
                throw ValidationError("mode entry must be [m, re, im] with integer m");
            int m = mj[0].get<int>();
            if (m != 0 && !period)
                throw ValidationError("autonomous model coefficient carries mode " + std::to_string(m));
            CVec v = CVec::Zero(dim);
            v(i) = cplx(number(mj[1], "mode real part"), number(mj[2], "mode imaginary part"));
            s.accumulate(m, v);
        }
    }
    return s;
}

Model parse_model(const json& doc) {
    if (!doc.is_object()) throw ValidationError("model document must be an object");
    const auto& nj = require(doc, "n");
    if (!nj.is_number_integer() || nj.get<int>() < 1) throw ValidationError("n must be a positive integer");
    const int n = nj.get<int>();

    std::optional<double> period;
    const auto& forcing = require(doc, "forcing");
    const std::string type = forcing.is_object() ? forcing.value("type", "") : "";
    if (type == "periodic") {
        period = number(require(forcing, "T"), "forcing period T");
    } else if (type != "autonomous") {
        throw ValidationError("forcing.type must be 'autonomous' or 'periodic'");
    }

    LinearPart L;
    const auto& delays = require(doc, "delays");
    const auto& matrices = require(doc, "matrices");
    if (!delays.is_array() || !matrices.is_array())
        throw ValidationError("delays and matrices must be lists");
    if (delays.size() != matrices.size())
        throw ValidationError("number of delays and matrices differ");
    for (std::size_t j = 0; j < delays.size(); ++j) {
        L.delays.push_back(number(delays[j], "delay"));
        L.matrices.push_back(matrix_from_json(matrices[j], n));
    }
    if (auto it = doc.find("max_delay"); it != doc.end()) L.max_delay = number(*it, "max_delay");

    std::optional<Eigen::VectorXd> eq;
    if (auto it = doc.find("equilibrium"); it != doc.end() && !it->is_null()) {
        if (!it->is_array() || static_cast<int>(it->size()) != n)
            throw ValidationError("equilibrium must have n entries");
        eq = Eigen::VectorXd(n);
        for (int i = 0; i < n; ++i) (*eq)(i) = number((*it)[i], "equilibrium entry");
    }

    return Model(n, period, std::move(L), stencil_from_json(doc, "bilinear", 2, n, period),
                 stencil_from_json(doc, "trilinear", 3, n, period), eq);
}

Model parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") + e.what());
    }
    return parse_model(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

Model load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

json model_to_json(const Model& model) {
    json doc;
    doc["n"] = model.n();
    if (model.period()) {
        doc["forcing"] = {{"type", "periodic"}, {"T", *model.period()}};
    } else {
        doc["forcing"] = {{"type", "autonomous"}};
    }
    doc["delays"] = model.linear().delays;
    doc["max_delay"] = model.max_delay();
    json mats = json::array();
    for (const auto& A : model.linear().matrices) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back(A(r, c));
            rows.push_back(row);
        }
        mats.push_back(rows);
    }
    doc["matrices"] = mats;
    auto stencil_json = [](const std::optional<MultilinearStencil>& st) {
        json terms = json::array();
        if (!st) return terms;
        for (const auto& t : st->terms) {
            json slots = json::array();
            for (const auto& s : t.slots) slots.push_back(json::array({s.delay, s.component}));
            terms.push_back({{"slots", slots}, {"coeff", vector_series_to_json(t.coeff)}, {"real", t.real}});
        }
        return terms;
    };
    doc["bilinear"] = stencil_json(model.bilinear());
    doc["trilinear"] = stencil_json(model.trilinear());
    json eq = json::array();
    for (Eigen::Index i = 0; i < model.n(); ++i) eq.push_back(model.equilibrium()(i));
    doc["equilibrium"] = eq;
    return doc;
}

std::string serialize_model(const Model& model) { return model_to_json(model).dump(2) + "\n"; }

void save_model(const Model& model, const std::filesystem::path& path) {
    write_text_file(path, serialize_model(model));
}

}  // namespace pfdde
