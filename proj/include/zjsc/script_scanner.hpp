#pragma once

// Shallow lexical scan of fragment scripts. A fragment's scripts are treated
// as one closure whose top-level function declarations become the
// component's instance methods; nothing is ever executed.

#include "zjsc/fragment.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace zjsc {

inline constexpr std::string_view on_connected_hook = "onConnected";
inline constexpr std::string_view on_disconnected_hook = "onDisconnected";

struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

struct ScriptProfile {
    std::vector<std::string> methods; // declaration order, unique
    bool has_on_connected = false;
    bool has_on_disconnected = false;
    ByteSpan span;

    bool has_method(std::string_view name) const;
};

enum class ScanIssueKind { UnterminatedString, UnterminatedComment, DuplicateMethod };

const char* to_string(ScanIssueKind kind);

struct ScanIssue {
    ScanIssueKind kind;
    std::size_t offset = 0; // within the script body, or the fragment for method_table
    std::string detail;
    NodePath element;       // script element, set by method_table

    bool is_error() const noexcept { return kind != ScanIssueKind::DuplicateMethod; }
};

struct ScanResult {
    ScriptProfile profile;
    std::vector<ScanIssue> issues;

    bool has_errors() const;
};

/// Scans one script body. Always returns a best-effort profile; unterminated
/// strings and comments are reported in `issues`.
ScanResult scan_script(std::string_view body);

/// Scans every script element of a fragment in document order and merges
/// the results; on a name collision the first declaration wins.
ScanResult method_table(const FragmentDocument& doc);

} // namespace zjsc
