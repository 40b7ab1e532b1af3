// Acceptance gate: runs every verification check over the full grids and
// prints one line per criterion. Exits 0 only when all ten pass.

#include <cstdio>

#include <sqmz/verify.hpp>

int main() {
    const sqmz::VerifyReport report = sqmz::verify();

    int index = 0;
    for (const sqmz::CheckResult& check : report.checks) {
        ++index;
        std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", check.passed ? "PASS" : "FAIL", index,
                    check.name.c_str(), check.seconds, check.detail.empty() ? "" : " -- ",
                    check.detail.c_str());
    }

    std::size_t passed = 0;
    for (const sqmz::CheckResult& check : report.checks) passed += check.passed ? 1 : 0;
    std::printf("%zu/%zu acceptance criteria satisfied\n", passed, report.checks.size());
    return report.all_passed() ? 0 : 1;
}
