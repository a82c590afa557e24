from rknl_machine.verification.decoding import (DecodeReport, Decoder, Verdict, classify_step, decode_closure,
                                                 decode_config, decode_stack, verify_run)
from rknl_machine.verification.potential import (PotentialReport, check_run, emit_potential_csv, phi_config,
                                                  phi_stack, phi_store, phi_term, phi_value, potential_series)

__all__ = ['DecodeReport',
           'Decoder',
           'Verdict',
           'classify_step',
           'decode_closure',
           'decode_config',
           'decode_stack',
           'verify_run',
           'PotentialReport',
           'check_run',
           'emit_potential_csv',
           'phi_config',
           'phi_stack',
           'phi_store',
           'phi_term',
           'phi_value',
           'potential_series']
