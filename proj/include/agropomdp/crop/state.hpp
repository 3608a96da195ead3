#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace agro::crop {

inline constexpr std::size_t kStateVariables = 28;
inline constexpr std::size_t kObservedVariables = 10;

/// Internal variable names in observation order. The first ten are the
/// partially observed subset.
inline constexpr std::array<std::string_view, kStateVariables> kVariableNames{
    "cumsumfert", "dap",    "istage", "pltpop", "rain",    "sw",    "tmax",   "tmin",  "vstage", "xlai",
    "cleach",     "cnox",   "dtt",    "es",     "grnwt",   "nstres", "pcngrn", "rtdep", "runoff", "srad",
    "swfac",      "tleachd", "tnoxd", "topwt",  "totir",   "trnu",  "wtdep",  "wtnup"};

/// Crop, soil and weather variables for one simulated day, plus the hidden
/// pools that drive them.
struct CropState {
    double cumsumfert = 0;  // kg/ha
    double dap = 0;         // days after planting
    double istage = 1;      // 1..9
    double pltpop = 0;      // plants/m2
    double rain = 0;        // mm/d
    double sw = 0;          // cm3/cm3
    double tmax = 0;        // deg C
    double tmin = 0;        // deg C
    double vstage = 0;      // leaves
    double xlai = 0;        // m2/m2
    double cleach = 0;      // kg/ha
    double cnox = 0;        // kg/ha
    double dtt = 0;         // deg C d
    double es = 0;          // mm/d
    double grnwt = 0;       // kg/ha
    double nstres = 1;      // [0,1], 1 = unstressed
    double pcngrn = 0;      // fraction
    double rtdep = 0;       // cm
    double runoff = 0;      // mm/d
    double srad = 0;        // MJ/m2/d
    double swfac = 1;       // [0,1], 1 = unstressed
    double tleachd = 0;     // kg/ha
    double tnoxd = 0;       // kg/ha
    double topwt = 0;       // kg/ha
    double totir = 0;       // mm, rain-fed so always 0
    double trnu = 0;        // kg/ha
    double wtdep = 0;       // cm
    double wtnup = 0;       // kg/ha

    // hidden pools
    double soil_water = 0;     // mm in the root zone bucket
    double soil_nitrogen = 0;  // kg/ha mineral N
    double biomass = 0;        // kg/ha
    double gdd = 0;            // accumulated deg C d
    double lai_peak = 0;

    std::array<double, kStateVariables> variables() const {
        return {cumsumfert, dap,    istage, pltpop,  rain,   sw,      tmax,  tmin,  vstage, xlai,
                cleach,     cnox,   dtt,    es,      grnwt,  nstres,  pcngrn, rtdep, runoff, srad,
                swfac,      tleachd, tnoxd, topwt,   totir,  trnu,    wtdep, wtnup};
    }

    friend bool operator==(const CropState&, const CropState&) = default;
};

}  // namespace agro::crop
