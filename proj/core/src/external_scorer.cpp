#include "mefgen/iqa.hpp"
#include "mefgen/png_io.hpp"
#include "mefgen/rng.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace mefgen {

namespace {

// bounds concurrently running scorer subprocesses process-wide
class Gate {
  public:
    void set_limit(int limit) {
        std::lock_guard lock(mutex_);
        limit_ = std::max(limit, 1);
        cv_.notify_all();
    }
    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }
    void release() {
        std::lock_guard lock(mutex_);
        --active_;
        cv_.notify_one();
    }

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int limit_ = 4;
    int active_ = 0;
};

Gate& scorer_gate() {
    static Gate gate;
    return gate;
}

struct TempFile {
    std::filesystem::path path;
    ~TempFile() {
        if (!path.empty()) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
    }
};

std::filesystem::path make_temp_png() {
    static std::atomic<std::uint64_t> counter{0};
    const std::uint64_t tag = derive_seed(static_cast<std::uint64_t>(::getpid()), counter.fetch_add(1));
    return std::filesystem::temp_directory_path() /
           ("mefgen_score_" + std::to_string(::getpid()) + "_" + std::to_string(tag) + ".png");
}

struct RunResult {
    int exit_status = -1;
    bool timed_out = false;
    std::string stdout_text;
};

RunResult run_command(const std::vector<std::string>& argv, double timeout_seconds) {
    int pipe_fd[2];
    if (::pipe(pipe_fd) != 0) {
        throw IqaError(std::string("pipe failed: ") + std::strerror(errno));
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(pipe_fd[0]);
        ::close(pipe_fd[1]);
        throw IqaError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        // own process group, so a timeout kill reaps grandchildren too
        ::setpgid(0, 0);
        ::dup2(pipe_fd[1], STDOUT_FILENO);
        ::close(pipe_fd[0]);
        ::close(pipe_fd[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const std::string& a : argv) {
            args.push_back(const_cast<char*>(a.c_str()));
        }
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        std::_Exit(127);
    }

    ::close(pipe_fd[1]);
    RunResult result;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
    char buffer[4096];
    bool open = true;
    while (open) {
        const auto now = std::chrono::steady_clock::now();
        const long long remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        if (remaining <= 0) {
            result.timed_out = true;
            break;
        }
        struct pollfd pfd{pipe_fd[0], POLLIN, 0};
        const int rv = ::poll(&pfd, 1, static_cast<int>(std::min(remaining, 1000LL)));
        if (rv < 0 && errno != EINTR) {
            break;
        }
        if (rv > 0) {
            const ssize_t got = ::read(pipe_fd[0], buffer, sizeof(buffer));
            if (got <= 0) {
                open = false;
            } else {
                result.stdout_text.append(buffer, static_cast<std::size_t>(got));
            }
        }
    }
    ::close(pipe_fd[0]);

    if (result.timed_out) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (WIFEXITED(status)) {
        result.exit_status = WEXITSTATUS(status);
    } else {
        result.exit_status = -1;
    }
    return result;
}

}  // namespace

void set_external_scorer_parallelism(int limit) {
    scorer_gate().set_limit(limit);
}

IqaScore external_score(const SrgbImage& img, const ExternalScorerConfig& cfg) {
    if (cfg.command.empty()) {
        throw IqaError("external scorer command is empty");
    }
    TempFile tmp;
    tmp.path = make_temp_png();
    save_image(tmp.path, img);

    std::vector<std::string> argv = cfg.command;
    argv.push_back(tmp.path.string());

    scorer_gate().acquire();
    RunResult run;
    try {
        run = run_command(argv, cfg.timeout_seconds);
    } catch (...) {
        scorer_gate().release();
        throw;
    }
    scorer_gate().release();

    if (run.timed_out) {
        throw IqaError("scorer timeout after " + std::to_string(cfg.timeout_seconds) + "s: " + cfg.command[0]);
    }
    if (run.exit_status != 0) {
        throw IqaError("scorer exited with status " + std::to_string(run.exit_status) + ": " + cfg.command[0]);
    }

    // exactly one decimal number, surrounding whitespace allowed
    const char* begin = run.stdout_text.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) {
        throw IqaError("unparseable scorer output: \"" + run.stdout_text + "\"");
    }
    for (const char* p = end; *p; ++p) {
        if (!std::isspace(static_cast<unsigned char>(*p))) {
            throw IqaError("unparseable scorer output: \"" + run.stdout_text + "\"");
        }
    }
    if (!std::isfinite(value)) {
        throw IqaError("scorer returned a non-finite value");
    }
    return {cfg.metric_name, value, cfg.polarity};
}

}  // namespace mefgen
