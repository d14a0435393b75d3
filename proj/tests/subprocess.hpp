// Tiny popen wrapper for driving the CLI binary from test code.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <sys/wait.h>

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs a shell command, capturing stdout. stderr is dropped unless the
// caller already redirected it inside `cmd`.
inline RunResult run_cmd(const std::string& cmd) {
    std::string full = cmd;
    if (full.find("2>") == std::string::npos) full += " 2>/dev/null";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed: " + full);
    RunResult res;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, got);
    int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

inline std::string shq(const std::string& s) {
    std::string q = "'";
    for (char c : s)
        if (c == '\'')
            q += "'\\''";
        else
            q += c;
    q += "'";
    return q;
}

inline void write_file(const std::string& path, const std::string& text) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}
