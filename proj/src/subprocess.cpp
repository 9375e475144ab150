#include "otx/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "otx/errors.hpp"

namespace otx::proc {

CommandResult run_command(const std::string& command, double timeout_s) {
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw command_error("pipe() failed: " + std::string(std::strerror(errno)));

    const pid_t pid = fork();
    if (pid < 0) throw command_error("fork() failed: " + std::string(std::strerror(errno)));

    if (pid == 0) {
        setpgid(0, 0);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    CommandResult result;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    bool out_open = true, err_open = true;
    char buf[4096];

    while (out_open || err_open) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        const int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
        const int rc = poll(fds, nfds, std::min(wait_ms, 200));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }

        auto drain = [&](int fd, std::string& sink, bool& open_flag) {
            while (true) {
                const ssize_t n = read(fd, buf, sizeof(buf));
                if (n > 0) {
                    sink.append(buf, static_cast<std::size_t>(n));
                } else if (n == 0) {
                    open_flag = false;
                    close(fd);
                    break;
                } else {
                    break;  // EAGAIN or error; retry via poll
                }
            }
        };
        for (nfds_t k = 0; k < nfds; ++k) {
            if (!(fds[k].revents & (POLLIN | POLLHUP))) continue;
            if (fds[k].fd == out_pipe[0])
                drain(out_pipe[0], result.out, out_open);
            else
                drain(err_pipe[0], result.err, err_open);
        }
    }
    if (out_open) close(out_pipe[0]);
    if (err_open) close(err_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (result.timed_out)
        result.exit_code = -1;
    else if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    return result;
}

}  // namespace otx::proc
