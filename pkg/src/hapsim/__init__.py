"""Air-to-air mmWave channel simulator for two mobile high-altitude platforms.

Subpackage map:

* ``mobility``   -- Gauss-Markov + random-walk rotation movement processes
* ``kinematics`` -- relative HAP geometry and the LoS Doppler frequency
* ``arrays``     -- URPA steering vectors, analog beamforming, beam gain
* ``channel``    -- cluster/path MIMO channel synthesis and tapped-delay model
* ``link``       -- multicarrier received signal, ICI covariance, SINR, capacity
* ``stats``      -- analytic gain / SNR / ICI / SINR distributions
* ``harness``    -- seeded Monte-Carlo experiment runner (one CSV per figure)
* ``cli``        -- command-line front end (``hapsim <subcommand>``)
"""

SPEED_OF_LIGHT = 299792458.0  # m/s

__version__ = "0.1.0"

__all__ = ["SPEED_OF_LIGHT", "__version__"]
