#include "ness/model_io.hpp"

#include <fstream>
#include <sstream>

namespace ness {

namespace {

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ValidationError("unknown key '" + it.key() + "' in " + where);
    }
}

ComplexAmplitude amplitude_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("amplitude must be an object {nu, g}");
    reject_unknown_keys(j, {"nu", "g"}, "amplitude");
    if (!j.contains("nu")) throw ValidationError("amplitude missing 'nu'");
    const double nu = j.at("nu").get<double>();
    const double g = j.value("g", 0.0);
    return ComplexAmplitude::make(nu, g);
}

Json amplitude_to_json(const ComplexAmplitude& a) {
    return Json{{"nu", a.nu}, {"g", a.g}};
}

Species species_from_char(char c) {
    if (c == 'o') return Species::Odd;
    if (c == 'e') return Species::Even;
    throw ValidationError("species must be 'o' or 'e'");
}

std::string pair_to_string(Species a, Species b) {
    std::string s;
    s += (a == Species::Odd ? 'o' : 'e');
    s += (b == Species::Odd ? 'o' : 'e');
    return s;
}

} // namespace

LatticeModel model_from_json(const Json& doc) {
    if (!doc.is_object()) throw ValidationError("model document must be a JSON object");
    reject_unknown_keys(doc, {"generators", "hamiltonian", "chain"}, "model");
    if (!doc.contains("generators")) throw ValidationError("model missing 'generators'");
    if (!doc.contains("chain")) throw ValidationError("model missing 'chain'");

    LatticeModel model;
    for (const auto& jg : doc.at("generators")) {
        reject_unknown_keys(jg, {"span", "odd", "even", "normalized"}, "generator");
        LindbladGenerator gen;
        if (!jg.contains("odd")) throw ValidationError("generator missing 'odd'");
        for (const auto& ja : jg.at("odd")) gen.oddCoeffs.push_back(amplitude_from_json(ja));
        if (jg.contains("even"))
            for (const auto& ja : jg.at("even"))
                gen.evenCoeffs.push_back(amplitude_from_json(ja));
        else
            gen.evenCoeffs.assign(gen.oddCoeffs.size(), ComplexAmplitude{});
        gen.normalized = jg.value("normalized", false);
        if (jg.contains("span")) {
            const int span = jg.at("span").get<int>();
            if (span != gen.span())
                throw ValidationError("generator 'span' does not match coefficient count");
        }
        model.generators.push_back(std::move(gen));
    }

    if (doc.contains("hamiltonian") && !doc.at("hamiltonian").is_null()) {
        const Json& jh = doc.at("hamiltonian");
        reject_unknown_keys(jh, {"terms"}, "hamiltonian");
        HamiltonianStencil st;
        for (const auto& jt : jh.at("terms")) {
            reject_unknown_keys(jt, {"offset", "pair", "coeff"}, "hamiltonian term");
            HamiltonianTerm term;
            term.offset = jt.at("offset").get<int>();
            const std::string pair = jt.at("pair").get<std::string>();
            if (pair.size() != 2) throw ValidationError("species pair must have two letters");
            term.a = species_from_char(pair[0]);
            term.b = species_from_char(pair[1]);
            term.coeff = jt.at("coeff").get<double>();
            st.couplings.push_back(term);
        }
        model.hamiltonian = std::move(st);
    }

    const Json& jc = doc.at("chain");
    if (jc.is_string()) {
        if (jc.get<std::string>() != "infinite")
            throw ValidationError("chain string form must be \"infinite\"");
        model.chain = ChainSpec::infinite();
    } else if (jc.is_object()) {
        reject_unknown_keys(jc, {"infinite", "finite"}, "chain");
        if (jc.contains("infinite")) {
            model.chain = ChainSpec::infinite();
        } else if (jc.contains("finite")) {
            const Json& jf = jc.at("finite");
            reject_unknown_keys(jf, {"L", "periodic"}, "finite chain");
            model.chain = ChainSpec::finite(jf.at("L").get<int>(), jf.value("periodic", true));
        } else {
            throw ValidationError("chain must be \"infinite\" or {\"finite\": {...}}");
        }
    } else {
        throw ValidationError("chain must be \"infinite\" or {\"finite\": {...}}");
    }

    model.validate();
    return model;
}

Json model_to_json(const LatticeModel& model) {
    Json doc;
    doc["generators"] = Json::array();
    for (const auto& gen : model.generators) {
        Json jg;
        jg["span"] = gen.span();
        jg["odd"] = Json::array();
        for (const auto& a : gen.oddCoeffs) jg["odd"].push_back(amplitude_to_json(a));
        jg["even"] = Json::array();
        for (const auto& a : gen.evenCoeffs) jg["even"].push_back(amplitude_to_json(a));
        if (gen.normalized) jg["normalized"] = true;
        doc["generators"].push_back(std::move(jg));
    }
    if (model.hamiltonian) {
        Json jh;
        jh["terms"] = Json::array();
        for (const auto& t : model.hamiltonian->couplings)
            jh["terms"].push_back(Json{{"offset", t.offset},
                                       {"pair", pair_to_string(t.a, t.b)},
                                       {"coeff", t.coeff}});
        doc["hamiltonian"] = std::move(jh);
    }
    if (model.chain.is_finite())
        doc["chain"] = Json{{"finite", Json{{"L", model.chain.L},
                                            {"periodic", model.chain.periodic}}}};
    else
        doc["chain"] = "infinite";
    return doc;
}

LatticeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file: " + path.string());
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

Json rootset_to_json(const RootSet& rs) {
    Json doc;
    doc["cleared_degree"] = rs.cleared_degree;
    doc["roots"] = Json::array();
    for (const auto& r : rs.roots) {
        const char* cls = r.cls == RootClass::Inside ? "inside"
                          : r.cls == RootClass::OnCircle ? "on-circle"
                                                         : "outside";
        doc["roots"].push_back(Json{{"re", r.z.real()},
                                    {"im", r.z.imag()},
                                    {"multiplicity", r.multiplicity},
                                    {"classification", cls}});
    }
    return doc;
}

Json report_to_json(const CriticalityReport& report) {
    Json doc;
    doc["critical"] = report.critical;
    doc["candidates"] = Json::array();
    for (const auto& c : report.candidates)
        doc["candidates"].push_back(Json{{"z0_re", c.z0.real()},
                                         {"z0_im", c.z0.imag()},
                                         {"momentOrder", c.momentOrder},
                                         {"mergingRootCount", c.mergingRootCount}});
    doc["predictedLambda"] = report.predictedLambda;
    doc["predictedManifoldDim"] = report.predictedManifoldDim;
    if (std::isfinite(report.xi_inverse))
        doc["xi_inverse"] = report.xi_inverse;
    else
        doc["xi_inverse"] = "inf";
    doc["normalizationFactor"] = report.normalizationFactor;
    return doc;
}

Json family_to_json(const CriticalSolutionFamily& family) {
    Json doc;
    doc["coefficients"] = Json::array();
    for (const auto& s : family.coefficients)
        doc["coefficients"].push_back(Json{{"re", s.real()}, {"im", s.imag()}});
    doc["freeDirections"] = Json::array();
    for (const auto& dir : family.freeDirections) {
        Json jd = Json::array();
        for (const auto& s : dir) jd.push_back(Json{{"re", s.real()}, {"im", s.imag()}});
        doc["freeDirections"].push_back(std::move(jd));
    }
    doc["residual"] = family.residual;
    doc["verified"] = family.verified;
    return doc;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path.string());
    out.precision(17);
    return out;
}

} // namespace

void write_profile_csv(const std::filesystem::path& path, const CorrelationProfile& profile,
                       const CsvOptions& opts) {
    auto out = open_out(path);
    if (opts.metadata)
        out << "# achieved_error=" << profile.achieved_error << "\n";
    out << "d,re,im\n";
    for (size_t k = 0; k < profile.distances.size(); ++k)
        out << profile.distances[k] << ',' << profile.values[k].real() << ','
            << profile.values[k].imag() << '\n';
}

void write_matrix_csv(const std::filesystem::path& path, const CorrelationMatrix& gamma,
                      const CsvOptions& opts) {
    auto out = open_out(path);
    if (opts.metadata) out << "# L=" << gamma.L << "\n";
    for (int i = 0; i < gamma.gamma.rows(); ++i) {
        for (int j = 0; j < gamma.gamma.cols(); ++j) {
            if (j) out << ',';
            out << gamma.gamma(i, j);
        }
        out << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points,
                     const CsvOptions& opts) {
    auto out = open_out(path);
    if (opts.metadata) {
        int failures = 0;
        for (const auto& p : points)
            if (!p.ok) ++failures;
        out << "# points=" << points.size() << " failures=" << failures << "\n";
    }
    out << "g,xi_inv,gap,root_mod\n";
    for (const auto& pt : points) {
        out << pt.parameter << ',';
        if (std::isfinite(pt.xi_inverse))
            out << pt.xi_inverse;
        else if (pt.xi_inverse > 0)
            out << "inf";
        else
            out << "nan";
        out << ',' << pt.gap << ',' << pt.root_modulus << '\n';
    }
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& phi,
                        const std::vector<double>& rate, const CsvOptions& opts) {
    if (phi.size() != rate.size()) throw ValidationError("spectrum column length mismatch");
    auto out = open_out(path);
    if (opts.metadata) out << "# samples=" << phi.size() << "\n";
    out << "phi,rate\n";
    for (size_t k = 0; k < phi.size(); ++k)
        out << phi[k] << ',' << rate[k] << '\n';
}

std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sweep file: " + path.string());
    std::vector<SweepPoint> points;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("g,", 0) != 0)
                throw ValidationError("sweep file missing 'g,xi_inv,gap,root_mod' header");
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        SweepPoint pt;
        auto next = [&]() {
            if (!std::getline(ss, field, ','))
                throw ValidationError("malformed sweep row: " + line);
            if (field == "inf") return std::numeric_limits<double>::infinity();
            if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
            return std::stod(field);
        };
        pt.parameter = next();
        pt.xi_inverse = next();
        pt.gap = next();
        pt.root_modulus = next();
        pt.ok = std::isfinite(pt.xi_inverse) || std::isinf(pt.xi_inverse);
        points.push_back(pt);
    }
    if (!header_seen) throw ValidationError("sweep file is empty");
    return points;
}

} // namespace ness
