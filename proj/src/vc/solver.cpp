#include "sra/vc/vcgen.hpp"

#include <atomic>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace sra {

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Invalid: return "Invalid";
    case Verdict::Unknown: return "Unknown";
    case Verdict::Timeout: return "Timeout";
    }
    return "Unknown";
}

std::string resolve_solver_command(const SolverOptions& o)
{
    if (!o.command.empty())
        return o.command;
    if (const char* env = std::getenv("SRA_SMT_CMD"); env && *env)
        return env;
    return "z3 -in";
}

namespace {

using Clock = std::chrono::steady_clock;

struct RunOutput {
    std::string out;
    std::string err;
    bool timed_out = false;
    bool spawn_failed = false;
    int status = 0;
};

void set_nonblocking(int fd)
{
    fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK);
}

// Runs `sh -c cmd`, feeding `input` on stdin; kills the process group at the deadline.
RunOutput run_process(const std::string& cmd, const std::string& input, double timeout_s)
{
    RunOutput r;
    int in[2], out[2], err[2];
    if (pipe(in) != 0 || pipe(out) != 0 || pipe(err) != 0) {
        r.spawn_failed = true;
        r.err = std::strerror(errno);
        return r;
    }
    pid_t pid = fork();
    if (pid < 0) {
        r.spawn_failed = true;
        r.err = std::strerror(errno);
        return r;
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in[0], 0);
        dup2(out[1], 1);
        dup2(err[1], 2);
        for (int fd : {in[0], in[1], out[0], out[1], err[0], err[1]})
            close(fd);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    close(in[0]);
    close(out[1]);
    close(err[1]);
    set_nonblocking(in[1]);
    set_nonblocking(out[0]);
    set_nonblocking(err[0]);

    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_s));
    std::size_t written = 0;
    int in_fd = in[1];
    bool out_open = true, err_open = true;
    char buf[65536];
    while (out_open || err_open) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            r.timed_out = true;
            break;
        }
        pollfd fds[3];
        int n = 0;
        int out_i = -1, err_i = -1, in_i = -1;
        if (out_open)
            out_i = n, fds[n++] = {out[0], POLLIN, 0};
        if (err_open)
            err_i = n, fds[n++] = {err[0], POLLIN, 0};
        if (in_fd >= 0)
            in_i = n, fds[n++] = {in_fd, POLLOUT, 0};
        int rc = poll(fds, static_cast<nfds_t>(n), static_cast<int>(std::min<long long>(left, 1000)));
        if (rc < 0 && errno != EINTR)
            break;
        if (rc <= 0)
            continue;
        auto drain = [&](int i, int fd, std::string& dst, bool& open) {
            if (i < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                return;
            ssize_t k = read(fd, buf, sizeof buf);
            if (k > 0)
                dst.append(buf, static_cast<std::size_t>(k));
            else if (k == 0 || (errno != EAGAIN && errno != EINTR))
                open = false;
        };
        drain(out_i, out[0], r.out, out_open);
        drain(err_i, err[0], r.err, err_open);
        if (in_i >= 0 && (fds[in_i].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t k = write(in_fd, input.data() + written, input.size() - written);
            if (k > 0)
                written += static_cast<std::size_t>(k);
            if ((k < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) {
                close(in_fd);
                in_fd = -1;
            }
        }
    }
    if (in_fd >= 0)
        close(in_fd);
    if (r.timed_out)
        kill(-pid, SIGKILL);
    close(out[0]);
    close(err[0]);
    waitpid(pid, &r.status, 0);
    return r;
}

std::string first_token(const std::string& s)
{
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        auto e = line.find_last_not_of(" \t\r");
        return line.substr(b, e - b + 1);
    }
    return {};
}

// Universes of uninterpreted sorts, from z3's model comments.
std::map<std::string, int> universes(const std::string& model)
{
    static const std::regex head(";; universe for ([^:]+):");
    std::map<std::string, int> out;
    std::istringstream in(model);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch mt;
        if (!std::regex_search(line, mt, head))
            continue;
        std::string elems;
        std::getline(in, elems);
        auto b = elems.find_first_not_of(";  ");
        std::size_t count = 0;
        std::istringstream es(b == std::string::npos ? "" : elems.substr(b));
        std::string tok;
        while (es >> tok)
            ++count;
        out[mt[1]] = static_cast<int>(count);
    }
    return out;
}

// --- counter-model read-back --------------------------------------------------

struct SExpr {
    std::string atom;
    std::vector<SExpr> items;
    bool list = false;
};

bool parse_sexpr(const std::string& s, std::size_t& i, SExpr& out)
{
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
    if (i >= s.size())
        return false;
    if (s[i] == '(') {
        out.list = true;
        ++i;
        for (;;) {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
                ++i;
            if (i >= s.size())
                return false;
            if (s[i] == ')') {
                ++i;
                return true;
            }
            SExpr child;
            if (!parse_sexpr(s, i, child))
                return false;
            out.items.push_back(std::move(child));
        }
    }
    if (s[i] == ')')
        return false;
    if (s[i] == '|') {
        auto e = s.find('|', i + 1);
        if (e == std::string::npos)
            return false;
        out.atom = s.substr(i + 1, e - i - 1);
        i = e + 1;
        return true;
    }
    std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')')
        ++i;
    out.atom = s.substr(b, i - b);
    return true;
}

struct FunDecl {
    std::string name;
    std::vector<std::string> args;
    std::string sort;
};

// Declarations of the task file whose arguments are all uninterpreted sorts.
std::vector<FunDecl> object_functions(const std::string& smt, const std::set<std::string>& sorts)
{
    std::vector<FunDecl> out;
    std::size_t pos = 0;
    while ((pos = smt.find("(declare-", pos)) != std::string::npos) {
        SExpr e;
        std::size_t i = pos;
        if (!parse_sexpr(smt, i, e) || e.items.size() < 3) {
            ++pos;
            continue;
        }
        pos = i;
        FunDecl f;
        f.name = e.items[1].atom;
        if (e.items[0].atom == "declare-const" && e.items.size() == 3) {
            f.sort = e.items[2].atom;
        } else if (e.items[0].atom == "declare-fun" && e.items.size() == 4) {
            bool ok = true;
            for (const auto& a : e.items[2].items) {
                ok = ok && sorts.count(a.atom);
                f.args.push_back(a.atom);
            }
            f.sort = e.items[3].atom;
            if (!ok)
                continue;
        } else {
            continue;
        }
        if (f.name.rfind("null.", 0) == 0)
            continue;
        out.push_back(std::move(f));
    }
    return out;
}

std::string render(const SExpr& v, const std::map<std::string, std::string>& names)
{
    if (!v.list) {
        auto it = names.find(v.atom);
        if (it != names.end())
            return it->second;
        if (v.atom == "timer.inactive")
            return "inactive";
        auto dot = v.atom.rfind('.');
        return dot == std::string::npos ? v.atom : v.atom.substr(dot + 1);
    }
    if (v.items.size() == 2 && v.items[0].atom == "-")
        return "-" + render(v.items[1], names);
    if (v.items.size() == 2 && v.items[0].atom == "timer.active")
        return render(v.items[1], names);
    std::string out = "(";
    for (std::size_t i = 0; i < v.items.size(); ++i)
        out += (i ? " " : "") + render(v.items[i], names);
    return out + ")";
}

std::string lower(std::string s)
{
    for (auto& ch : s)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

// Re-solves with every uninterpreted sort pinned to the universe size of the
// first model and reads back a candidate configuration and state pair.
std::string candidate(const std::string& smt, const std::map<std::string, int>& universe, const SolverOptions& o,
                      const std::string& cmd)
{
    auto cut = smt.rfind("(check-sat)");
    if (cut == std::string::npos || universe.empty())
        return {};
    std::set<std::string> sorts;
    for (const auto& [s, n] : universe)
        sorts.insert(s);
    std::vector<FunDecl> funs = object_functions(smt, sorts);

    std::ostringstream q;
    q << smt.substr(0, cut);
    std::map<std::string, std::vector<std::string>> elems;
    for (const auto& [sort, n] : universe) {
        std::string all = "(or";
        for (int i = 0; i < n; ++i) {
            std::string u = "u!" + sort + "!" + std::to_string(i);
            elems[sort].push_back(u);
            q << "(declare-const " << u << " " << sort << ")\n";
            all += " (= x " + u + ")";
        }
        q << "(assert (forall ((x " << sort << ")) " << all << (n == 0 ? " false" : "") << ")))\n";
        if (n > 1) {
            q << "(assert (distinct";
            for (const auto& u : elems[sort])
                q << " " << u;
            q << "))\n";
        }
    }
    struct Query {
        const FunDecl* fun;
        std::vector<std::string> args;
    };
    std::vector<Query> queries;
    std::string terms;
    for (const auto& f : funs) {
        std::vector<std::vector<std::string>> tuples{{}};
        for (const auto& a : f.args) {
            std::vector<std::vector<std::string>> next;
            for (const auto& t : tuples)
                for (const auto& u : elems[a]) {
                    next.push_back(t);
                    next.back().push_back(u);
                }
            tuples = std::move(next);
        }
        for (auto& t : tuples) {
            std::string term = f.args.empty() ? f.name : "(" + f.name;
            for (const auto& u : t)
                term += " " + u;
            if (!f.args.empty())
                term += ")";
            terms += " " + term;
            queries.push_back({&f, std::move(t)});
        }
    }
    if (queries.empty())
        return {};
    // The pinned constants come last: their values name the model's elements.
    std::vector<std::string> pinned;
    for (const auto& [sort, us] : elems)
        for (const auto& u : us) {
            pinned.push_back(u);
            terms += " " + u;
        }
    q << "(check-sat)\n(get-value (" << terms << "))\n";
    RunOutput run = run_process(cmd, q.str(), o.timeout_s);
    if (run.timed_out || run.spawn_failed || first_token(run.out) != "sat")
        return {};
    std::size_t i = run.out.find('(');
    SExpr values;
    if (i == std::string::npos || !parse_sexpr(run.out, i, values) || values.items.size() != queries.size() + pinned.size())
        return {};

    // Instance names: lowercase sort name and index among members of All_<sort>.
    std::map<std::string, std::string> names;
    std::map<std::string, std::vector<std::string>> members;
    for (std::size_t k = 0; k < queries.size(); ++k) {
        const auto& f = *queries[k].fun;
        if (f.name.rfind("All_", 0) == 0 && f.args.size() == 1 && values.items[k].items.size() == 2 &&
            values.items[k].items[1].atom == "true") {
            const std::string& sort = f.args[0];
            std::string n = lower(sort) + std::to_string(members[sort].size());
            names[queries[k].args[0]] = n;
            members[sort].push_back(n);
        }
    }
    // Model values of object sort print as Sort!val!i; map them through the pinned constants.
    std::map<std::string, std::string> value_names;
    for (std::size_t k = 0; k < pinned.size(); ++k) {
        const auto& pair = values.items[queries.size() + k];
        if (pair.items.size() != 2)
            continue;
        auto it = names.find(pinned[k]);
        value_names[pair.items[1].atom] = it != names.end() ? it->second : "<none>";
    }
    auto is_member = [&](const std::string& u) { return names.count(u) > 0; };

    std::ostringstream out;
    for (const auto& [sort, ms] : members) {
        out << sort << " = {";
        for (std::size_t k = 0; k < ms.size(); ++k)
            out << (k ? ", " : "") << ms[k];
        out << "}; ";
    }
    std::map<std::string, std::pair<std::string, std::string>> two_state; // key -> (pre, post)
    std::map<std::string, std::vector<std::string>> sets;
    std::vector<std::string> fixed;
    for (std::size_t k = 0; k < queries.size(); ++k) {
        const auto& f = *queries[k].fun;
        const auto& args = queries[k].args;
        if (f.name.rfind("All_", 0) == 0)
            continue;
        bool inst = true;
        for (const auto& a : args)
            inst = inst && is_member(a);
        if (!inst || values.items[k].items.size() != 2)
            continue;
        std::string v = render(values.items[k].items[1], value_names);
        std::string field = f.name;
        bool pre = field.rfind("pre.", 0) == 0;
        bool post = field.rfind("post.", 0) == 0;
        if (pre || post)
            field = field.substr(pre ? 4 : 5);
        auto dot = field.find('.');
        std::string fname = dot == std::string::npos ? field : field.substr(dot + 1);
        std::string key = args.empty() ? fname : names[args[0]] + "." + fname;
        if (args.size() == 2) {
            auto& mem = sets[key];
            if (v == "true")
                mem.push_back(names[args[1]]);
            continue;
        }
        if (pre)
            two_state[key].first = v;
        else if (post)
            two_state[key].second = v;
        else
            fixed.push_back(key + " = " + v);
    }
    for (const auto& [key, mem] : sets) {
        out << key << " = {";
        for (std::size_t k = 0; k < mem.size(); ++k)
            out << (k ? ", " : "") << mem[k];
        out << "}; ";
    }
    for (const auto& f : fixed)
        out << f << "; ";
    for (const auto& [key, pp] : two_state)
        out << key << ": " << pp.first << " -> " << pp.second << "; ";
    std::string s = out.str();
    if (s.size() >= 2)
        s.resize(s.size() - 2);
    return s;
}

} // namespace

VcResult discharge_one(const VerificationTask& t, const SolverOptions& o)
{
    VcResult res;
    res.task = t.id;
    res.solver = resolve_solver_command(o);
    auto start = Clock::now();
    RunOutput run = run_process(res.solver, t.smt, o.timeout_s);
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (run.spawn_failed) {
        res.verdict = Verdict::Unknown;
        res.detail = "cannot start solver: " + run.err;
        return res;
    }
    if (run.timed_out) {
        res.verdict = Verdict::Timeout;
        res.detail = "no answer within " + std::to_string(o.timeout_s) + " s";
        return res;
    }
    std::string answer = first_token(run.out);
    static const std::regex rl(":rlimit-count\\s+(\\d+)");
    std::smatch mt;
    if (std::regex_search(run.out, mt, rl))
        res.rlimit = std::stoll(mt[1]);
    if (answer == "unsat") {
        res.verdict = Verdict::Valid;
    } else if (answer == "sat") {
        res.verdict = Verdict::Invalid;
        auto b = run.out.find('\n');
        auto e = run.out.find("(:");
        res.model = run.out.substr(b == std::string::npos ? run.out.size() : b + 1,
                                   e == std::string::npos ? std::string::npos : e - b - 1);
        auto sizes = universes(res.model);
        res.model_summary = candidate(t.smt, sizes, o, res.solver);
        if (res.model_summary.empty())
            for (const auto& [sort, n] : sizes)
                res.model_summary += (res.model_summary.empty() ? "" : ", ") + sort + " universe " + std::to_string(n);
    } else {
        res.verdict = Verdict::Unknown;
        res.detail = answer.empty() ? run.err : answer;
        if (res.detail.empty())
            res.detail = "solver exited with status " + std::to_string(WEXITSTATUS(run.status));
    }
    return res;
}

std::vector<VcResult> discharge(const std::vector<VerificationTask>& tasks, const SolverOptions& o)
{
    std::vector<VcResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++)
            results[i] = discharge_one(tasks[i], o);
    };
    int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    return results;
}

} // namespace sra
