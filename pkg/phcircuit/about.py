# Copyright 2018-2019 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
r"""
This module contains the :func:`about` function to display all the details of the PHCircuit installation,
e.g., OS, version, `Numpy`, `Scipy` and `NetworkX` versions, and the installed integrators.
"""
import platform
import sys

import networkx
import numpy
import scipy

from phcircuit._version import __version__


def about():
    """
    Prints the information for the PHCircuit installation.
    """
    # pylint: disable=import-outside-toplevel,cyclic-import
    from phcircuit import plugin_integrators

    print("PHCircuit version:       {}".format(__version__))
    print("Platform info:           {}".format(platform.platform(aliased=True)))
    print("Python version:          {0}.{1}.{2}".format(*sys.version_info[0:3]))
    print("Numpy version:           {}".format(numpy.__version__))
    print("Scipy version:           {}".format(scipy.__version__))
    print("NetworkX version:        {}".format(networkx.__version__))

    print("Installed integrators:")

    for name in sorted(plugin_integrators):
        print("- {}".format(name))


if __name__ == "__main__":
    about()
