#include "mecmob/trace_io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mecmob/errors.hpp"

namespace mecmob {

using nlohmann::json;

namespace {

json point_json(Point p) { return json::array({p.x, p.y}); }

Point point_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw SchemaError("point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw SchemaError(std::string("trace is missing field '") + key + "'");
    }
    return obj.at(key);
}

}  // namespace

json trace_to_json(const ScenarioTrace& trace) {
    json doc;
    doc["schema"] = "mecmob.trace";
    doc["version"] = kTraceSchemaVersion;
    doc["units"] = {{"distance", "m"},
                    {"lambda", "workloads/period"},
                    {"service_rate", "workloads/period"},
                    {"background_load", "workloads/period"},
                    {"gain", "linear"},
                    {"power", "W"},
                    {"bandwidth", "Hz"},
                    {"rate", "bit/s"},
                    {"energy", "J"},
                    {"workload_size", "bit"},
                    {"delay", "rate-weighted response time"}};
    doc["seed"] = trace.seed;
    const auto& c = trace.consts;
    doc["constants"] = {{"workload_size_bits", c.workload_size_bits},
                        {"budget_j", c.budget_j},
                        {"horizon", c.horizon},
                        {"min_rate_bps", c.min_rate_bps},
                        {"max_delay", c.max_delay}};
    doc["radio"] = {{"noise_power_w", trace.radio.noise_power_w},
                    {"bandwidth_hz", trace.radio.bandwidth_hz},
                    {"tx_power_w", trace.radio.tx_power_w}};
    json bs = json::array();
    for (const auto& p : trace.topology.bs_positions) bs.push_back(point_json(p));
    doc["topology"] = {{"area_m", json::array({trace.topology.area.width, trace.topology.area.height})},
                       {"association_radius_m", trace.topology.association_radius},
                       {"bs_positions", std::move(bs)}};

    json periods = json::array();
    for (std::size_t t = 0; t < trace.periods.size(); ++t) {
        const auto& p = trace.periods[t];
        json s = json::array(), mu = json::array(), ch = json::array();
        for (const auto& server : p.servers) {
            s.push_back(server.service_rate);
            mu.push_back(server.background_load);
        }
        for (const auto& link : p.links) {
            ch.push_back({{"bs", link.bs},
                          {"gain", link.channel.gain},
                          {"interference", link.channel.interference}});
        }
        periods.push_back({{"t", t},
                           {"location", point_json(p.location)},
                           {"lambda", p.lambda},
                           {"service_rate", std::move(s)},
                           {"background_load", std::move(mu)},
                           {"channels", std::move(ch)}});
    }
    doc["periods"] = std::move(periods);
    return doc;
}

ScenarioTrace trace_from_json(const json& doc) {
    if (require(doc, "schema") != "mecmob.trace") throw SchemaError("not a mecmob.trace document");
    const int version = require(doc, "version").get<int>();
    if (version != kTraceSchemaVersion) {
        std::ostringstream msg;
        msg << "trace schema version " << version << " is not supported (expected "
            << kTraceSchemaVersion << ")";
        throw SchemaError(msg.str());
    }
    try {
        ScenarioTrace trace;
        trace.seed = require(doc, "seed").get<std::uint64_t>();
        const auto& c = require(doc, "constants");
        trace.consts.workload_size_bits = require(c, "workload_size_bits").get<double>();
        trace.consts.budget_j = require(c, "budget_j").get<double>();
        trace.consts.horizon = require(c, "horizon").get<int>();
        trace.consts.min_rate_bps = require(c, "min_rate_bps").get<double>();
        trace.consts.max_delay = require(c, "max_delay").get<double>();
        const auto& r = require(doc, "radio");
        trace.radio.noise_power_w = require(r, "noise_power_w").get<double>();
        trace.radio.bandwidth_hz = require(r, "bandwidth_hz").get<double>();
        trace.radio.tx_power_w = require(r, "tx_power_w").get<double>();
        const auto& topo = require(doc, "topology");
        const auto& area = require(topo, "area_m");
        if (!area.is_array() || area.size() != 2) throw SchemaError("area_m must be [w, h]");
        trace.topology.area = {area[0].get<double>(), area[1].get<double>()};
        trace.topology.association_radius = require(topo, "association_radius_m").get<double>();
        for (const auto& p : require(topo, "bs_positions")) trace.topology.bs_positions.push_back(point_from(p));

        const auto n_bs = trace.topology.bs_positions.size();
        const auto& periods = require(doc, "periods");
        for (std::size_t t = 0; t < periods.size(); ++t) {
            const auto& jp = periods[t];
            PeriodState p;
            p.location = point_from(require(jp, "location"));
            p.lambda = require(jp, "lambda").get<double>();
            const auto& s = require(jp, "service_rate");
            const auto& mu = require(jp, "background_load");
            if (s.size() != n_bs || mu.size() != n_bs) {
                throw SchemaError("period " + std::to_string(t) + ": server arrays must cover every BS");
            }
            for (std::size_t n = 0; n < n_bs; ++n) p.servers.push_back({s[n].get<double>(), mu[n].get<double>()});
            for (const auto& jc : require(jp, "channels")) {
                CandidateLink link;
                link.bs = require(jc, "bs").get<BsId>();
                link.channel = {require(jc, "gain").get<double>(), require(jc, "interference").get<double>(),
                                trace.radio.noise_power_w, trace.radio.bandwidth_hz, trace.radio.tx_power_w};
                p.links.push_back(link);
            }
            const auto expected = trace.topology.candidates(p.location);
            std::vector<BsId> got;
            for (const auto& link : p.links) got.push_back(link.bs);
            if (got != expected) {
                throw SchemaError("period " + std::to_string(t) +
                                  ": channel entries do not match the candidate set of the location");
            }
            trace.periods.push_back(std::move(p));
        }
        if (trace.consts.horizon != trace.horizon()) {
            throw SchemaError("constants.horizon does not match the number of periods");
        }
        return trace;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed trace: ") + e.what());
    }
}

void save_trace(const ScenarioTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << trace_to_json(trace).dump(1) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

ScenarioTrace load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return trace_from_json(doc);
}

std::string git_blob_sha1(std::string_view content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size());
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string trace_hash(const ScenarioTrace& trace) { return git_blob_sha1(trace_to_json(trace).dump()); }

}  // namespace mecmob
