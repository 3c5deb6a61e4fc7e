#ifndef FAIRPLUG_TEXT_IO_H_
#define FAIRPLUG_TEXT_IO_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fairplug {

// Shortest decimal representation that round-trips to the same double.
std::string FormatDouble(double value);

// Strict parse of a full string as a double; accepts "inf", "-inf".
double ParseDouble(std::string_view text);
long long ParseInt(std::string_view text);

std::vector<std::string> SplitString(std::string_view text, char delim);
std::string_view Trim(std::string_view text);
std::vector<double> ParseDoubleList(std::string_view text, char delim = ',');
std::string JoinDoubles(const std::vector<double>& values, char delim = ',');

// Flat `key=value` configuration text. '#' starts a comment line; blank
// lines are skipped; later keys override earlier ones.
using KeyValues = std::map<std::string, std::string, std::less<>>;
KeyValues ParseKeyValues(std::string_view text);
KeyValues ReadKeyValueFile(const std::filesystem::path& path);
std::string FormatKeyValues(const KeyValues& values);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

// FNV-1a 64-bit, hex encoded. Used for dataset and manifest fingerprints.
std::string Fingerprint(std::string_view bytes);

}  // namespace fairplug

#endif  // FAIRPLUG_TEXT_IO_H_
