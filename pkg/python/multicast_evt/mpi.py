################################################################################
#
# multicast_evt: extreme-value bounds for reliable multicast trees
#
# Copyright (C) 2026 The multicast_evt developers
#
# multicast_evt is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option)
# any later version.
#
# multicast_evt is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more
# details.
#
# You should have received a copy of the GNU General Public License along with
# multicast_evt. If not, see <http://www.gnu.org/licenses/>.
#
################################################################################
r"""
  multicast_evt.mpi
  =================

  Thin helper around mpi4py offering the few collective operations the
  package needs. Without mpi4py (or outside mpirun) everything runs on a
  single rank.
"""
import sys

import numpy as np

try:
    from mpi4py import MPI
    world = MPI.COMM_WORLD
except ImportError:
    MPI = None
    world = None

rank = world.Get_rank() if world is not None else 0
size = world.Get_size() if world is not None else 1


def is_master_node():
    """True on rank 0."""
    return rank == 0


def report(*args, **kwargs):
    """
    Prints a message on the master node only.
    """
    if is_master_node():
        print(*args, **kwargs)
        sys.stdout.flush()


def slice_array(arr):
    """
    Returns the contiguous part of `arr` handled by the current rank.
    """
    return np.array_split(np.asarray(arr), size)[rank]


def allgather(obj):
    """
    Collects `obj` from every rank, ordered by rank.
    """
    if size == 1:
        return [obj]
    return world.allgather(obj)
