#include "aiskit/shiptypes.hpp"

namespace aiskit {

std::string_view ship_type_name(int code) {
    if (code >= 20 && code <= 29) return "Wing in ground";
    if (code >= 40 && code <= 49) return "High speed craft";
    if (code >= 60 && code <= 69) return "Passenger";
    if (code >= 70 && code <= 79) return "Cargo";
    if (code >= 80 && code <= 89) return "Tanker";
    if (code >= 90 && code <= 99) return "Other";
    switch (code) {
        case 30: return "Fishing";
        case 31:
        case 32: return "Towing";
        case 33: return "Dredging";
        case 34: return "Diving";
        case 35: return "Military";
        case 36: return "Sailing";
        case 37: return "Pleasure craft";
        case 50: return "Pilot vessel";
        case 51: return "Search and rescue";
        case 52: return "Tug";
        case 53: return "Port tender";
        case 54: return "Anti-pollution";
        case 55: return "Law enforcement";
        case 58: return "Medical transport";
        case 59: return "Noncombatant";
        default: return "Unknown";
    }
}

std::string_view ship_type_class(int code) {
    if (code == 30) return "fishing";
    if (code >= 60 && code <= 69) return "passenger";
    if (code >= 70 && code <= 79) return "cargo";
    if (code >= 80 && code <= 89) return "tanker";
    return "other";
}

}  // namespace aiskit
