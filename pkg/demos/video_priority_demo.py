"""Walkthrough: how priority adjustment rescues a video stream under load.

Runs the shipped dumbbell scenario three times:

  baseline   the 30 FPS video stream alone on the 2 Mbps bottleneck
  congested  a 2 Mbps UDP blast starts at t=10 s and starves the video
  adjusted   telemetry mirroring + classifier + control loop promote the
             video flow to the top priority queue

and prints the delivered frame rate of each arm side by side.

Run with:  python3 demos/video_priority_demo.py
"""

from flowtune.config import default_dumbbell_config
from flowtune.scenario import run_scenario


def main():
    config = default_dumbbell_config()
    print(f"scenario: {config.duration_s} s on a "
          f"{config.bottleneck_rate_bps / 1e6:g} Mbps bottleneck, "
          f"video at {config.video.fps} FPS")
    print()
    print(f"{'arm':<10} {'video FPS':>10} {'delivered':>10} {'dropped':>8} "
          f"{'mirrored':>9} {'adjustments':>12}")
    for arm in ("baseline", "congested", "adjusted"):
        r = run_scenario(config, arm=arm)
        print(f"{arm:<10} {r.video_fps:>10.2f} {r.delivered:>10} {r.dropped:>8} "
              f"{r.mirrored:>9} {r.adjustments:>12}")
    print()
    print("The adjusted arm mirrors telemetry every 10 ms, trains a decision")
    print("tree on the labeled records, and writes priority 7 back into the")
    print("switch register for the flow classified as a camera stream.")


if __name__ == "__main__":
    main()
