// Integration checks of the CLI binary: exit codes, artifact schemas, and
// byte-identical reruns (same seed, any thread count). Plain main so the
// binary path and data dir come straight from CTest arguments.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_tree(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::filesystem::path> fa, fb;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(std::filesystem::relative(e.path(), a));
  for (const auto& e : std::filesystem::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(std::filesystem::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& rel : fa)
    if (slurp(a / rel) != slurp(b / rel)) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: test_cli <aniso-binary> <data-dir>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const std::string data = argv[2];
  const std::filesystem::path work =
      std::filesystem::temp_directory_path() / "aniso_cli_test";
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);

  check(run(bin + " validate " + data + "/net1.json > " + (work / "v.txt").string()) == 0,
        "validate net1 exits 0");
  check(slurp(work / "v.txt").find("2 species, 1 reaction pairs") != std::string::npos,
        "validate prints species/reaction counts");

  check(run(bin + " validate " + data + "/bad_q.json 2> " + (work / "err.json").string()) == 2,
        "validation failure exits 2");
  check(slurp(work / "err.json").find("arrhenius_exponent out of range") != std::string::npos,
        "error JSON names the violated invariant");

  check(run(bin + " nonsense > /dev/null 2>&1") == 1, "usage error exits 1");

  // Determinism: identical seeds, different thread counts, byte-equal trees.
  const auto out1 = work / "ssa1";
  const auto out2 = work / "ssa2";
  const auto out3 = work / "ssa3";
  const std::string ssa_args = " ssa " + data + "/net1.json --rho0 0.5,0.5 --theta0 1"
                               " --V 50 --T 20 --N 8 --seed 42 --out ";
  check(run(bin + ssa_args + out1.string() + " > /dev/null") == 0, "ssa run 1 exits 0");
  check(run(bin + ssa_args + out2.string() + " > /dev/null") == 0, "ssa run 2 exits 0");
  check(run("ANISO_THREADS=4 " + bin + ssa_args + out3.string() + " > /dev/null") == 0,
        "ssa run 3 (4 threads) exits 0");
  check(same_tree(out1, out2), "repeated ssa runs are byte-identical");
  check(same_tree(out1, out3), "thread count does not change artifacts");

  // Different seed must change the event logs.
  const auto out4 = work / "ssa4";
  check(run(bin + " ssa " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --V 50 --T 20"
                " --N 8 --seed 43 --out " + out4.string() + " > /dev/null") == 0,
        "ssa run with another seed exits 0");
  check(!same_tree(out1, out4), "different seed changes the artifacts");

  // ODE artifact header matches the documented schema.
  const auto ode_dir = work / "ode";
  check(run(bin + " ode " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --T 1 --steps 100"
                " --out " + ode_dir.string() + " > /dev/null") == 0,
        "ode exits 0");
  {
    const std::string csv = slurp(ode_dir / "trajectory.csv");
    check(csv.rfind("t,A,B,theta,w_0\n", 0) == 0, "trajectory.csv header");
    check(csv.find('\r') == std::string::npos, "trajectory.csv uses LF only");
  }

  // Repeated report runs are byte-identical and sections are as expected.
  const auto rep1 = work / "rep1";
  const auto rep2 = work / "rep2";
  const std::string rep_args = " report " + data + "/net2.json --rho0 0.34,0.33,0.33"
                               " --theta0 1 --grid 12 --out ";
  check(run(bin + rep_args + rep1.string() + " > " + (rep1.string() + ".txt")) == 0,
        "report on net2 exits 0");
  check(run(bin + rep_args + rep2.string() + " > /dev/null") == 0, "report rerun exits 0");
  check(same_tree(rep1, rep2), "report artifacts are byte-identical");
  {
    const std::string rep = slurp(rep1 / "report.json");
    check(rep.find("\"idb\": false") != std::string::npos, "net2 report: idb false");
    check(rep.find("\"icb\": true") != std::string::npos, "net2 report: icb true");
    check(rep.find("onsager_machlup") != std::string::npos &&
              rep.find("not in isothermal detailed balance") != std::string::npos,
          "net2 report: OM section skipped with reason");
  }

  // Cell division: hypotheses fail, analysis sections skipped with reason.
  const auto rep3 = work / "rep3";
  check(run(bin + " report " + data + "/cell_division.json --rho0 1 --theta0 1 --out " +
            rep3.string() + " > /dev/null") == 0,
        "report on cell division exits 0");
  {
    const std::string rep = slurp(rep3 / "report.json");
    check(rep.find("\"bounded\": false") != std::string::npos, "cell division: unbounded");
    check(rep.find("\"skipped\"") != std::string::npos, "cell division: sections skipped");
  }

  // Boundary classification on the two worked examples.
  const auto bdir = work / "boundary";
  check(run(bin + " check boundary " + data + "/cell_division.json --rho0 0 --theta0 1"
                " --query " + data + "/boundary_cell_division.json --out " + bdir.string() +
            " > " + (bdir.string() + ".txt")) == 0,
        "boundary check (cell division) exits 0");
  check(slurp(bdir.string() + ".txt").find("escapable") != std::string::npos,
        "cell division verdict: escapable");
  check(run(bin + " check boundary " + data + "/heating_room.json --rho0 1 --theta0 0"
                " --query " + data + "/boundary_heating.json --out " + bdir.string() +
            " > " + (bdir.string() + "2.txt")) == 0,
        "boundary check (heating room) exits 0");
  check(slurp(bdir.string() + "2.txt").find("trapped") != std::string::npos,
        "heating room verdict: trapped");

  // check hjb exits 0 on net2 (constant transition energy) at tol 1e-10.
  check(run(bin + " check hjb " + data + "/net2.json --rho0 0.34,0.33,0.33 --theta0 1"
                " --grid 20 > /dev/null") == 0,
        "check hjb exits 0 on net2");

  // ode -> ldp round trip: the expected path costs (numerically) nothing.
  const auto ldp_dir = work / "ldp";
  check(run(bin + " ldp " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --traj " +
            (ode_dir / "trajectory.csv").string() + " --out " + ldp_dir.string() +
            " > /dev/null") == 0,
        "ldp (state path) exits 0");
  check(run(bin + " ldp " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --flux --traj " +
            (ode_dir / "trajectory.csv").string() + " --out " + ldp_dir.string() +
            " > /dev/null") == 0,
        "ldp (flux path) exits 0");
  {
    const std::string cost = slurp(ldp_dir / "ldp_cost.json");
    const auto pos = cost.find("\"total\": ");
    check(pos != std::string::npos, "ldp_cost.json has a total");
    check(std::abs(std::stod(cost.substr(pos + 9))) <= 1e-6, "expected path cost ~ 0");
  }

  // quasipotential grid artifact and exact invariant with the rate table.
  const auto qp_dir = work / "qp";
  check(run(bin + " quasipotential " + data + "/net1.json --rho0 0.5,0.5 --theta0 1"
                " --grid 25 --out " + qp_dir.string() + " > /dev/null") == 0,
        "quasipotential exits 0");
  check(slurp(qp_dir / "quasipotential.csv").rfind("A,B,theta,value,grad_norm,hjb_residual\n",
                                                   0) == 0,
        "quasipotential.csv header");

  const auto inv_dir = work / "inv";
  check(run(bin + " invariant " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --V 20"
                " --rate-table 100,400 --target 0.3 --out " + inv_dir.string() +
            " > /dev/null") == 0,
        "invariant exits 0");
  check(slurp(inv_dir / "rate_convergence.csv").rfind("V,rate,limit,deviation\n", 0) == 0,
        "rate_convergence.csv header");
  check(slurp(inv_dir / "invariant_exact.csv").rfind("i,n_A,probability\n", 0) == 0,
        "invariant_exact.csv header");

  // report on NET-1: IDB sections pass.
  const auto rep4 = work / "rep4";
  check(run(bin + " report " + data + "/net1.json --rho0 0.5,0.5 --theta0 1 --grid 25"
                " --out " + rep4.string() + " > /dev/null") == 0,
        "report on net1 exits 0");
  {
    const std::string rep = slurp(rep4 / "report.json");
    check(rep.find("\"idb\": true") != std::string::npos, "net1 report: idb true");
    check(rep.find("\"symmetry_violated\"") == std::string::npos,
          "net1 report: time-reversal not flagged");
    check(rep.find("\"pass\": false") == std::string::npos, "net1 report: all sections pass");
  }

  std::cout << (failures == 0 ? "ALL OK\n" : "FAILURES\n");
  return failures == 0 ? 0 : 1;
}
