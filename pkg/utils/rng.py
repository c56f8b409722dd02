import zlib

import numpy as np

GENERATOR_NAME = 'philox'


def make_rng(seed, *labels):
    """
    Independent Philox stream for (seed, labels).

    Each consumer names its stream (e.g. make_rng(seed, 'lagrangian', 'R2'))
    so adding a consumer never shifts the numbers another one sees.
    """
    spawn_key = tuple(zlib.crc32(str(label).encode('utf-8')) for label in labels)
    seq = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(seq))


def describe(seed):
    return {'generator': GENERATOR_NAME, 'seed': int(seed)}
