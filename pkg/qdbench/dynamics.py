#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Pulsed resonant driving of the two-level emitter.

The drive pulse is treated as instantaneous: emission clocks start at the
pulse time.  Re-excitation and laser leakage are folded into a single
multi-photon probability per pulse.
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import optimize

from qdbench._i18n import _
from qdbench import exceptions
from qdbench import model
from qdbench import oracle
from qdbench import sharding

LOG = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class PulseTrain:
    pulse_area: float
    n_periods: int
    pair_mode: bool = False

    @property
    def slots(self):
        if self.pair_mode:
            return (model.SLOT_EARLY, model.SLOT_LATE)
        return (model.SLOT_ONLY,)


def excitation_probability(theta):
    """Rabi inversion sin^2(theta/2) after a pulse of area ``theta``."""
    if np.any(np.asarray(theta) < 0):
        raise exceptions.InvalidParameter(
            _('Pulse area must be non-negative'))
    return np.sin(np.asarray(theta, dtype=float) / 2.0) ** 2 \
        if np.ndim(theta) else math.sin(theta / 2.0) ** 2


def lorentzian_weight(detuning, linewidth):
    """Cavity overlap 1/(1+(2*detuning/linewidth)^2), both in meV."""
    if linewidth <= 0:
        raise exceptions.InvalidParameter(
            _('Cavity linewidth must be positive'))
    return 1.0 / (1.0 + (2.0 * detuning / linewidth) ** 2)


def effective_lifetime(device, cavity, detuning=None):
    """Radiative lifetime (ps) at a QD-cavity detuning (meV).

    Decay rates interpolate between the free rate 1/T_off and the
    Purcell-enhanced rate 1/T_on with a Lorentzian cavity weight.
    """
    if detuning is None:
        detuning = device.detuning
    weight = lorentzian_weight(detuning, cavity.linewidth_mev)
    rate_free = 1.0 / device.lifetime_detuned
    rate_on = 1.0 / device.lifetime_on_resonance
    return 1.0 / (rate_free + (rate_on - rate_free) * weight)


def indistinguishability(device, theta):
    """Pair coherence max(0, nu_0 - beta*theta^2) of a primary photon."""
    if theta < 0:
        raise exceptions.InvalidParameter(
            _('Pulse area must be non-negative'))
    return max(0.0, device.base_indistinguishability -
               device.dephasing_coefficient * theta ** 2)


def surplus_probability(device, theta):
    """Surplus photon probability p_mp * P_exc(theta)**order per pulse.

    Re-excitation needs a second excitation within one pulse, so weak
    pulses suppress it faster than the primary emission.
    """
    return (device.multi_photon_prob *
            excitation_probability(theta) ** device.multi_photon_order)


def calibrate_dephasing(theta_a, nu_a, theta_b, nu_b):
    """Return ``(nu_0, beta)`` of the line through two (theta, nu) points."""
    if theta_a == theta_b:
        raise exceptions.InvalidParameter(
            _('Calibration pulse areas must differ'))
    beta = (nu_a - nu_b) / (theta_b ** 2 - theta_a ** 2)
    nu_0 = nu_a + beta * theta_a ** 2
    return nu_0, beta


def emission_lifetimes(device, cavity):
    """Fast lifetime and slow fraction at the device detuning."""
    if device.detuning == 0 or cavity is None:
        if device.detuning != 0:
            raise exceptions.InvalidParameter(
                _('A detuned device needs cavity parameters'))
        return device.lifetime_on_resonance, device.slow_component_fraction
    weight = lorentzian_weight(device.detuning, cavity.linewidth_mev)
    return (effective_lifetime(device, cavity),
            device.slow_component_fraction * weight)


def _emit_shard(device, train, rng_seed, shard, start, stop,
                lifetime, slow_fraction):
    rng = sharding.shard_generator(rng_seed, sharding.STREAM_EMIT, shard)
    n = stop - start
    slots = np.array(train.slots, dtype=np.int8)
    shape = (n, len(slots))

    p_exc = excitation_probability(train.pulse_area)
    primary = rng.random(shape) < p_exc * device.extraction_efficiency
    extra = rng.random(shape) < surplus_probability(device,
                                                    train.pulse_area)
    t_primary = rng.exponential(lifetime, shape)
    if slow_fraction > 0:
        slow = rng.random(shape) < slow_fraction
        t_slow = rng.exponential(device.slow_lifetime, shape)
        t_primary = np.where(slow, t_slow, t_primary)
    t_extra = rng.exponential(lifetime, shape)

    # (period, slot, kind) in C order: primary before extra within a slot.
    present = np.stack([primary, extra], axis=-1)
    times = np.stack([t_primary, t_extra], axis=-1)
    periods = np.broadcast_to(
        np.arange(start, stop, dtype=np.int64)[:, None, None], present.shape)
    slot_ids = np.broadcast_to(slots[None, :, None], present.shape)
    is_extra = np.broadcast_to(np.array([False, True]), present.shape)
    coherence = indistinguishability(device, train.pulse_area)

    flat = present.ravel()
    extra_flags = is_extra.ravel()[flat]
    return model.PhotonStream(
        period_index=periods.ravel()[flat],
        slot=slot_ids.ravel()[flat],
        emission_time=times.ravel()[flat],
        polarization=np.full(int(flat.sum()), model.POL_H),
        pair_coherence=np.where(extra_flags, 0.0, coherence),
        is_extra=extra_flags)


def emit(device, bench, train, rng_seed, cavity=None, threads=1):
    """Sample the photons emitted over ``train.n_periods`` periods.

    Each pulse slot emits a primary photon with probability
    ``P_exc(theta) * eta`` and, independently, a surplus photon with
    probability ``p_mp * P_exc(theta)**order``.  The stream is a pure
    function of ``rng_seed`` and the parameters, whatever ``threads`` is.

    :returns: a :class:`qdbench.model.PhotonStream`
    """
    if train.n_periods < 1:
        raise exceptions.InvalidParameter(
            _('n_periods must be at least 1, got %s') % train.n_periods)
    if train.pulse_area < 0:
        raise exceptions.InvalidParameter(
            _('Pulse area must be non-negative'))
    model.ensure_valid(device=device, cavity=cavity, bench=bench)
    lifetime, slow_fraction = emission_lifetimes(device, cavity)

    def _shard(shard, start, stop):
        return _emit_shard(device, train, rng_seed, shard, start, stop,
                           lifetime, slow_fraction)

    photons = model.PhotonStream.concatenate(sharding.run_sharded(
        _shard, sharding.shard_ranges(train.n_periods), threads))
    LOG.info('Emitted %d photon(s) over %d period(s) at pulse area %.4g',
             len(photons), train.n_periods, train.pulse_area)
    return photons


def expected_detected_rate(device, bench, theta, efficiency=None):
    """Mean detected count rate (cps) of a single-pulse train.

    ``efficiency`` defaults to the setup efficiency of ``bench``.
    """
    if efficiency is None:
        efficiency = bench.setup_efficiency
    p_exc = excitation_probability(theta)
    per_pulse = (p_exc * device.extraction_efficiency +
                 surplus_probability(device, theta))
    return bench.rep_rate * 1e6 * per_pulse * efficiency


def calibrate_multi_photon(device, target_g2, theta=math.pi):
    """Find ``p_mp`` giving ``target_g2`` at pulse area ``theta``.

    The mapping is the HBT enumeration oracle; the root is bracketed on
    ``[0, 1]``.
    """
    if target_g2 <= 0:
        return 0.0
    p_exc = excitation_probability(theta)
    p_primary = p_exc * device.extraction_efficiency
    if p_primary <= 0:
        raise exceptions.InvalidParameter(
            _('No primary emission at pulse area %s') % theta)

    def _mismatch(p_mp):
        surplus = p_mp * p_exc ** device.multi_photon_order
        return oracle.hbt_g2(p_primary, surplus) - target_g2

    if _mismatch(1.0) < 0:
        raise exceptions.InvalidParameter(
            _('g2(0)=%s is out of reach with p_mp <= 1') % target_g2)
    p_mp = optimize.brentq(_mismatch, 0.0, 1.0, xtol=1e-15, rtol=1e-12)
    LOG.debug('Calibrated p_mp=%.6g for g2(0)=%.6g', p_mp, target_g2)
    return p_mp
