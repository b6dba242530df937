#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "provol/calibration.hpp"
#include "provol/market.hpp"
#include "provol/pricing.hpp"

namespace provol::data {

// One input row: an opaque label (usually a date; no calendar math is done)
// and a positive price level. File order is preserved.
struct PriceRecord {
    std::string label;
    double price;
};

struct PriceTable {
    std::vector<PriceRecord> records;
    market::PriceSeries prices() const;
};

// Reads a two-column CSV `date,price`. A non-numeric price in the first row is
// treated as a header and skipped. Rows with a missing, unparseable, or
// non-positive price raise parse_error naming the 1-based row number. At least
// two valid rows are required.
PriceTable read_price_csv(std::istream& in);
PriceTable read_price_csv(const std::string& path);

// Last S records; throws std::out_of_range when S exceeds the table size.
PriceTable tail(const PriceTable& table, std::size_t S);

// All writers emit a header row and round-trip-exact decimal floats
// (shortest representation that parses back to the identical double).
void write_series_csv(std::ostream& out, const std::vector<double>& values);        // index,value
void write_regression_csv(std::ostream& out, const calibration::RegressionEstimate& est); // y,f_hat,g2_hat,clamped,valid
void write_surface_csv(std::ostream& out, const pricing::IvSurface& surface);       // K,T_months,iv,valid,reason,vega
void write_vega_csv(std::ostream& out, const pricing::VegaMap& map);                // K,T_months,vega
void write_convergence_csv(std::ostream& out, const std::vector<pricing::ConvergenceRow>& rows); // paths,std_dev

// Round-trip-exact decimal rendering of one double (shortest form).
std::string format_double(double v);

// Generic reader for the emitted tables: header row plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

} // namespace provol::data
