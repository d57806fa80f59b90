import numpy as np

from robust_mckp.rng import (
    SplitMix64,
    draw_matrix_u64,
    mix64,
    substream,
    substream_states,
    u64_to_unit,
)


def test_streams_are_deterministic():
    a = [SplitMix64(99).next_u64() for _ in range(10)]
    b = [SplitMix64(99).next_u64() for _ in range(10)]
    assert a == b


def test_substreams_do_not_overlap_shifted():
    # sibling streams must not be shifted copies of each other
    s0 = substream(7, 0)
    s1 = substream(7, 1)
    seq0 = [s0.next_u64() for _ in range(20)]
    seq1 = [s1.next_u64() for _ in range(20)]
    assert seq0[1:] != seq1[:-1]
    assert len(set(seq0) & set(seq1)) == 0


def test_vectorized_matches_scalar():
    states = substream_states(123456, np.arange(16, dtype=np.uint64))
    mat = draw_matrix_u64(states, 9)
    for k in range(16):
        s = substream(123456, k)
        assert mat[k].tolist() == [s.next_u64() for _ in range(9)]


def test_unit_mapping_matches_scalar_uniform():
    s = substream(5, 3)
    scalar = [s.uniform() for _ in range(6)]
    states = substream_states(5, np.array([3], dtype=np.uint64))
    vec = u64_to_unit(draw_matrix_u64(states, 6))[0]
    assert scalar == vec.tolist()


def test_uniform_range_and_normal_moments():
    s = SplitMix64(1)
    xs = [s.uniform() for _ in range(10000)]
    assert all(0.0 <= x < 1.0 for x in xs)
    s = SplitMix64(2)
    zs = [s.normal() for _ in range(20000)]
    mean = sum(zs) / len(zs)
    var = sum(z * z for z in zs) / len(zs) - mean**2
    assert abs(mean) < 0.03
    assert abs(var - 1.0) < 0.05


def test_mix64_is_stable():
    # frozen reference values pin the stream across platforms
    assert mix64(0) == 0
    s = SplitMix64(0)
    assert s.next_u64() == 16294208416658607535
    assert s.next_u64() == 7960286522194355700
