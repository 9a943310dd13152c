#include "lobsim/calib/bundle.hpp"

#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lobsim/data/csv.hpp"

namespace lobsim {

namespace fs = std::filesystem;

MarketModel CalibrationBundle::market_model() const {
    MarketModel m{rates, placement, impact.model, opening_bids, opening_asks, initial_fundamental, proxy.sigma_v};
    return m;
}

namespace {

std::string artifact(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

std::ofstream open_artifact(const std::string& dir, const char* name, const std::string& provenance) {
    auto out = open_output(artifact(dir, name));
    if (!provenance.empty()) out << "# " << provenance << '\n';
    return out;
}

std::string require(const std::string& dir, const char* name) {
    auto path = artifact(dir, name);
    if (!fs::exists(path)) throw IoError(fmt::format("calibration bundle {} is missing {}", dir, name));
    return path;
}

void expect_fields(const CsvReader& r, const std::vector<std::string_view>& f, std::size_t n) {
    if (f.size() != n) throw IoError(fmt::format("{}:{}: expected {} fields, got {}", r.path(), r.line(), n, f.size()));
}

}  // namespace

void write_bundle(const std::string& dir, const CalibrationBundle& b, const std::string& provenance) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create bundle directory {}: {}", dir, ec.message()));

    nlohmann::json meta;
    meta["version"] = kBundleVersion;
    std::vector<std::string> windows;
    for (const auto& w : b.windows) windows.push_back(format_window(w));
    meta["session_windows"] = windows;
    meta["step_ms"] = b.step_ms;
    meta["bucket_origin_minute"] = b.placement.origin_minute();
    meta["bucket_minutes"] = b.placement.window_minutes();
    meta["calibration_seed"] = b.calibration_seed;
    if (!provenance.empty()) meta["provenance"] = provenance;
    {
        auto out = open_output(artifact(dir, "bundle.json"));
        out << meta.dump(2) << '\n';
    }

    SessionCalendar cal = b.calendar();
    {
        auto out = open_artifact(dir, "rates.csv", provenance);
        out << "minute,alpha,mu\n";
        for (const auto& w : cal.windows()) {
            for (int m = w.start_minute; m < w.end_minute; ++m) {
                out << fmt::format("{},{},{}\n", m, b.rates.alpha_at(m), b.rates.mu_at(m));
            }
        }
    }
    {
        auto out = open_artifact(dir, "volume_profile.csv", provenance);
        out << "minute,market_volume\n";
        for (const auto& w : cal.windows()) {
            for (int m = w.start_minute; m < w.end_minute; ++m) out << fmt::format("{},{}\n", m, b.rates.volume_at(m));
        }
    }
    {
        auto out = open_artifact(dir, "placement.csv", provenance);
        out << "kind,spread_bucket,time_bucket,depth,volume,duration\n";
        for (const auto& [key, bucket] : b.placement.buckets()) {
            for (const auto& l : bucket.limits) {
                out << fmt::format("limit,{},{},{},{},{}\n", key.first, key.second, l.depth, l.volume, l.duration);
            }
            for (Qty v : bucket.markets) out << fmt::format("market,{},{},0,{},0\n", key.first, key.second, v);
        }
    }
    {
        auto out = open_artifact(dir, "impact.csv", provenance);
        out << "lambda_mi,gamma_mi,r2_loglog,r2_nls,method,sigma_v,v0\n";
        out << fmt::format("{},{},{},{},{},{},{}\n", b.impact.model.scale, b.impact.model.exponent, b.impact.r2_loglog,
                           b.impact.r2_nls, b.impact.method, b.proxy.sigma_v, b.initial_fundamental);
    }
    {
        auto out = open_artifact(dir, "fundamental_proxy.csv", provenance);
        out << "step,v_hat\n";
        for (std::size_t t = 0; t < b.proxy.v_hat.size(); ++t) out << fmt::format("{},{}\n", t, b.proxy.v_hat[t]);
    }
    {
        auto out = open_artifact(dir, "chiarella.csv", provenance);
        const auto& c = b.chiarella;
        out << "kappa,beta_h,gamma_h,eta_h,beta_l,gamma_l,eta_l,sigma,distance\n";
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", c.kappa, c.beta_h, c.gamma_h, c.eta_h, c.beta_l, c.gamma_l,
                           c.eta_l, c.sigma, b.distance);
    }
    {
        auto out = open_artifact(dir, "evaluation_log.csv", provenance);
        out << "trial,kappa,beta_l,gamma_l,beta_h,gamma_h,sigma,distance\n";
        for (std::size_t i = 0; i < b.evaluation_log.size(); ++i) {
            const auto& c = b.evaluation_log[i].params;
            out << fmt::format("{},{},{},{},{},{},{},{}\n", i, c.kappa, c.beta_l, c.gamma_l, c.beta_h, c.gamma_h,
                               c.sigma, b.evaluation_log[i].distance);
        }
    }
    {
        auto out = open_artifact(dir, "opening_book.csv", provenance);
        out << "side,price,qty\n";
        for (const auto& l : b.opening_bids) out << fmt::format("Buy,{},{}\n", l.price, l.volume);
        for (const auto& l : b.opening_asks) out << fmt::format("Sell,{},{}\n", l.price, l.volume);
    }
}

CalibrationBundle read_bundle(const std::string& dir) {
    if (!fs::is_directory(dir)) throw IoError(fmt::format("calibration bundle directory {} does not exist", dir));
    CalibrationBundle b;
    int origin = 0, width = 30;
    {
        std::ifstream in(require(dir, "bundle.json"));
        nlohmann::json meta;
        try {
            in >> meta;
            if (meta.at("version").get<int>() != kBundleVersion) {
                throw IoError(fmt::format("bundle {} has unsupported version {}", dir, meta.at("version").dump()));
            }
            for (const auto& w : meta.at("session_windows")) b.windows.push_back(parse_window(w.get<std::string>()));
            b.step_ms = meta.at("step_ms").get<int>();
            origin = meta.at("bucket_origin_minute").get<int>();
            width = meta.at("bucket_minutes").get<int>();
            b.calibration_seed = meta.value("calibration_seed", std::uint64_t{0});
        } catch (const nlohmann::json::exception& e) {
            throw IoError(fmt::format("{}/bundle.json: {}", dir, e.what()));
        }
    }
    b.placement = EmpiricalOrderDistribution(origin, width);
    {
        CsvReader r(require(dir, "rates.csv"), {"minute", "alpha", "mu"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 3);
            auto m = static_cast<std::size_t>(parse_int((*f)[0], r)) % RateProfile::kMinutes;
            b.rates.alpha[m] = parse_double((*f)[1], r);
            b.rates.mu[m] = parse_double((*f)[2], r);
        }
    }
    {
        CsvReader r(require(dir, "volume_profile.csv"), {"minute", "market_volume"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 2);
            auto m = static_cast<std::size_t>(parse_int((*f)[0], r)) % RateProfile::kMinutes;
            b.rates.market_volume[m] = parse_double((*f)[1], r);
        }
    }
    {
        CsvReader r(require(dir, "placement.csv"), {"kind", "spread_bucket", "time_bucket", "depth", "volume", "duration"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 6);
            int sb = static_cast<int>(parse_int((*f)[1], r));
            int tb = static_cast<int>(parse_int((*f)[2], r));
            if ((*f)[0] == "limit") {
                b.placement.add_limit_to_bucket(sb, tb, {parse_int((*f)[3], r), parse_int((*f)[4], r), parse_int((*f)[5], r)});
            } else if ((*f)[0] == "market") {
                b.placement.add_market_to_bucket(sb, tb, parse_int((*f)[4], r));
            } else {
                throw IoError(fmt::format("{}:{}: unknown placement kind", r.path(), r.line()));
            }
        }
    }
    {
        CsvReader r(require(dir, "impact.csv"), {"lambda_mi", "gamma_mi", "r2_loglog", "r2_nls", "method", "sigma_v", "v0"});
        auto f = r.next();
        if (!f) throw IoError(fmt::format("{}/impact.csv has no data row", dir));
        expect_fields(r, *f, 7);
        b.impact.model = {parse_double((*f)[0], r), parse_double((*f)[1], r)};
        b.impact.r2_loglog = parse_double((*f)[2], r);
        b.impact.r2_nls = parse_double((*f)[3], r);
        b.impact.method = std::string((*f)[4]);
        b.proxy.sigma_v = parse_double((*f)[5], r);
        b.initial_fundamental = parse_double((*f)[6], r);
        if (!b.impact.model.valid()) throw IoError(fmt::format("{}/impact.csv holds an invalid impact model", dir));
    }
    {
        CsvReader r(require(dir, "fundamental_proxy.csv"), {"step", "v_hat"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 2);
            b.proxy.v_hat.push_back(parse_double((*f)[1], r));
        }
    }
    {
        CsvReader r(require(dir, "chiarella.csv"),
                    {"kappa", "beta_h", "gamma_h", "eta_h", "beta_l", "gamma_l", "eta_l", "sigma", "distance"});
        auto f = r.next();
        if (!f) throw IoError(fmt::format("{}/chiarella.csv has no data row", dir));
        expect_fields(r, *f, 9);
        auto& c = b.chiarella;
        c.kappa = parse_double((*f)[0], r);
        c.beta_h = parse_double((*f)[1], r);
        c.gamma_h = parse_double((*f)[2], r);
        c.eta_h = parse_double((*f)[3], r);
        c.beta_l = parse_double((*f)[4], r);
        c.gamma_l = parse_double((*f)[5], r);
        c.eta_l = parse_double((*f)[6], r);
        c.sigma = parse_double((*f)[7], r);
        b.distance = parse_double((*f)[8], r);
        try {
            c.validate();
        } catch (const ConfigError& e) {
            throw IoError(fmt::format("{}/chiarella.csv: {}", dir, e.what()));
        }
    }
    {
        CsvReader r(require(dir, "evaluation_log.csv"),
                    {"trial", "kappa", "beta_l", "gamma_l", "beta_h", "gamma_h", "sigma", "distance"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 8);
            ChiarellaParams c = b.chiarella;
            c.kappa = parse_double((*f)[1], r);
            c.beta_l = parse_double((*f)[2], r);
            c.gamma_l = parse_double((*f)[3], r);
            c.beta_h = parse_double((*f)[4], r);
            c.gamma_h = parse_double((*f)[5], r);
            c.sigma = parse_double((*f)[6], r);
            b.evaluation_log.push_back({c, parse_double((*f)[7], r)});
        }
    }
    {
        CsvReader r(require(dir, "opening_book.csv"), {"side", "price", "qty"});
        while (auto f = r.next()) {
            expect_fields(r, *f, 3);
            PriceLevel l{parse_int((*f)[1], r), parse_int((*f)[2], r)};
            (parse_side((*f)[0]) == Side::Buy ? b.opening_bids : b.opening_asks).push_back(l);
        }
        if (b.opening_bids.empty() || b.opening_asks.empty()) {
            throw IoError(fmt::format("{}/opening_book.csv needs both sides", dir));
        }
    }
    if (!b.placement.has_limits() || !b.placement.has_markets()) {
        throw IoError(fmt::format("{}/placement.csv needs limit and market tuples", dir));
    }
    return b;
}

}  // namespace lobsim
