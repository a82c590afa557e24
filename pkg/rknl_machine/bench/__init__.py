from rknl_machine.bench.families import FAMILIES, Family, expected_kn, expected_steps, family, make
from rknl_machine.bench.harness import BenchRow, emit_bench_csv, implosion_profile, run_table
from rknl_machine.bench.corpus import enumerate_terms, random_closed_terms

__all__ = ['FAMILIES',
           'Family',
           'expected_kn',
           'expected_steps',
           'family',
           'make',
           'BenchRow',
           'emit_bench_csv',
           'implosion_profile',
           'run_table',
           'enumerate_terms',
           'random_closed_terms']
