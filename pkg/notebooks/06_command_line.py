"""
Running experiments from the command line
=========================================

The ``rmtesff`` command wraps the same runner. A flat key = value file sets
the defaults and flags override single values.
"""

# %%
import pathlib
import subprocess
import sys
import tempfile

from rmtesff import read_results

work = pathlib.Path(tempfile.mkdtemp())
(work / "weak.cfg").write_text("model = rmte\nN = 4\nL = 2\nepsilon = 0.05\nmoments = 1,2\n"
                               "realizations = 200\nseed = 42\n")
cmd = [sys.executable, "-m", "rmtesff", "run", "--config", str(work / "weak.cfg"),
       "--epsilon", "0.12", "--out", str(work / "out")]
print(subprocess.run(cmd, capture_output=True, text=True, check=True).stdout)

# %%
table, meta = read_results(work / "out")
print("Gamma =", meta["Gamma"], "tau_Th =", meta["tau_Th"])
print(table["t"][:5], table["kappa_mean"][:5])
