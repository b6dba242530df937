#include "provol/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "provol/errors.hpp"

namespace provol::data {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_price(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    const char* tail = last;
    while (tail > first && (tail[-1] == ' ' || tail[-1] == '\t')) --tail;
    const auto res = std::from_chars(first, tail, out);
    return res.ec == std::errc() && res.ptr == tail && first != tail;
}

} // namespace

market::PriceSeries PriceTable::prices() const {
    market::PriceSeries out;
    out.reserve(records.size());
    for (const PriceRecord& rec : records) out.push_back(rec.price);
    return out;
}

PriceTable read_price_csv(std::istream& in) {
    PriceTable table;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2)
            throw parse_error("row " + std::to_string(row) + ": expected 2 columns, got " +
                              std::to_string(fields.size()));
        double price = 0.0;
        if (!parse_price(fields[1], price)) {
            if (row == 1) continue; // header row: non-numeric price cell
            throw parse_error("row " + std::to_string(row) + ": unparseable price '" + fields[1] +
                              "'");
        }
        if (!(price > 0.0))
            throw parse_error("row " + std::to_string(row) + ": price must be positive, got '" +
                              fields[1] + "'");
        table.records.push_back({fields[0], price});
    }
    if (row == 0) throw parse_error("empty price file");
    if (table.records.size() < 2)
        throw parse_error("need at least 2 valid price rows, got " +
                          std::to_string(table.records.size()));
    return table;
}

PriceTable read_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price file: " + path);
    return read_price_csv(in);
}

PriceTable tail(const PriceTable& table, std::size_t S) {
    if (S > table.records.size())
        throw std::out_of_range("tail: window " + std::to_string(S) + " exceeds table size " +
                                std::to_string(table.records.size()));
    PriceTable out;
    out.records.assign(table.records.end() - static_cast<std::ptrdiff_t>(S), table.records.end());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& out, const std::vector<double>& values) {
    out << "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << format_double(values[i]) << '\n';
}

void write_regression_csv(std::ostream& out, const calibration::RegressionEstimate& est) {
    out << "y,f_hat,g2_hat,clamped,valid\n";
    for (std::size_t k = 0; k < est.grid.size(); ++k) {
        out << format_double(est.grid[k]) << ',' << format_double(est.f_hat[k]) << ','
            << format_double(est.g2_hat[k]) << ',' << int(est.clamped[k]) << ','
            << int(est.valid[k]) << '\n';
    }
}

void write_surface_csv(std::ostream& out, const pricing::IvSurface& surface) {
    out << "K,T_months,iv,valid,reason,vega\n";
    for (std::size_t t_idx = 0; t_idx < surface.maturities_months.size(); ++t_idx) {
        for (std::size_t k_idx = 0; k_idx < surface.strikes.size(); ++k_idx) {
            const pricing::IvResult& cell = surface.at(t_idx, k_idx);
            const bool has_root =
                cell.valid || cell.reason == pricing::IvFailure::vega_guard;
            out << format_double(surface.strikes[k_idx]) << ','
                << surface.maturities_months[t_idx] << ','
                << (cell.valid ? format_double(cell.sigma) : "nan") << ',' << int(cell.valid)
                << ',' << pricing::to_string(cell.reason) << ','
                << (has_root ? format_double(cell.vega) : "nan") << '\n';
        }
    }
}

void write_vega_csv(std::ostream& out, const pricing::VegaMap& map) {
    out << "K,T_months,vega\n";
    for (std::size_t t_idx = 0; t_idx < map.maturities_months.size(); ++t_idx)
        for (std::size_t k_idx = 0; k_idx < map.strikes.size(); ++k_idx)
            out << format_double(map.strikes[k_idx]) << ',' << map.maturities_months[t_idx] << ','
                << format_double(map.values[t_idx * map.strikes.size() + k_idx]) << '\n';
}

void write_convergence_csv(std::ostream& out, const std::vector<pricing::ConvergenceRow>& rows) {
    out << "paths,std_dev\n";
    for (const pricing::ConvergenceRow& row : rows)
        out << row.paths << ',' << format_double(row.std_dev) << '\n';
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

} // namespace provol::data
