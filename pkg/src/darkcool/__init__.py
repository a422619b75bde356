"""Double-dark-state cooling of a trapped ion: model, master equation, rates, spectra."""
from .model import IonParams, dressed_frame, magic_condition
from .dynamics import evolve, fit_exponential, initial_state, liouvillian_for, steady_state
from .rates import (gamma_resolvent, nss_analytic, optimal_delta_g, rates_closed_form,
                    rates_resolvent, w_max)
from .spectra import absorption_spectrum, locate_features

__version__ = "0.1.0"
