# coding: utf-8

# # The command-line tool
#
# The same computations are available from the shell.  Each subcommand reads
# a JSON model file and writes CSV.  Here the tool is driven through
# subprocess so the script can run unattended.

# In[1]:

import pathlib
import subprocess
import sys

CONFIGS = pathlib.Path(__file__).resolve().parent / "configs"


def lambertdde(*args):
    proc = subprocess.run([sys.executable, "-m", "lambertdde", *args],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


# Stability verdict for each shipped model.

# In[2]:

for cfg in sorted(CONFIGS.glob("*.json")):
    code, out, err = lambertdde("stability", "--config", str(cfg))
    print(f"{cfg.stem:18s} {out.strip() or err.strip()}")


# The root table for the two-delay model, first few lines.

# In[3]:

code, out, err = lambertdde("roots", "--config", str(CONFIGS / "two_delay.json"), "--branches", "1")
print("\n".join(out.splitlines()[:5]))
print(err.strip())


# Spectral solution against the RK4 reference.  The last line of the CSV
# carries the sup error over the requested window.

# In[4]:

code, out, _ = lambertdde("compare", "--config", str(CONFIGS / "two_delay.json"), "--window", "1,10")
print(out.splitlines()[-1])


# Error against branch depth.

# In[5]:

code, out, _ = lambertdde("error-curve", "--config", str(CONFIGS / "two_delay.json"),
                          "--k-list", "0,2,4,8", "--window", "1,10")
print(out)
