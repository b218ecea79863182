#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace zjsc {

/// Canonical location of a fragment: an absolute filesystem path or an
/// absolute http(s) URL, with dot segments collapsed.
class Locator {
public:
    Locator() = default;
    explicit Locator(std::string value) : m_value(std::move(value)) {}

    /// Canonical form of a local path (made absolute, separators unified).
    static Locator from_path(const std::filesystem::path& path);

    const std::string& str() const noexcept { return m_value; }
    bool empty() const noexcept { return m_value.empty(); }
    bool is_url() const noexcept;

    /// The filesystem path; only meaningful when !is_url().
    std::filesystem::path path() const { return std::filesystem::path(m_value); }

    friend auto operator<=>(const Locator&, const Locator&) = default;
    friend bool operator==(const Locator&, const Locator&) = default;

private:
    std::string m_value;
};

/// Resolves `ref` against `base` (RFC 3986 reference resolution for URLs,
/// directory-relative for paths). When `sandbox_root` is given, file results
/// must stay inside it. Throws LocatorError.
Locator canonicalize(const Locator& base, std::string_view ref,
                     const std::optional<std::filesystem::path>& sandbox_root = std::nullopt);

/// Collapses "." and ".." segments of a '/'-separated absolute path.
std::string remove_dot_segments(std::string_view path);

/// Short display form: relative to `relative_to` (a directory) when the
/// locator lies beneath it, the full locator otherwise.
std::string display_locator(const Locator& locator, const std::filesystem::path& relative_to);

/// Reference that canonicalize(document, ref) maps back to `target`: a
/// relative path between two file locators, the full locator otherwise.
std::string relative_reference(const Locator& target, const Locator& document);

} // namespace zjsc

template <>
struct std::hash<zjsc::Locator> {
    std::size_t operator()(const zjsc::Locator& l) const noexcept { return std::hash<std::string>{}(l.str()); }
};
