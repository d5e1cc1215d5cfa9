from typing import List

from ...pnr.dissymmetry import DissymmetryReport


class DissymmetryTableGenerator:
    @staticmethod
    def generate(report: DissymmetryReport, limit: int = 0) -> str:
        """
        Fixed-width text table of the most critical channels: channel, rail
        capacitances (fF) and d_A at two decimals. ``limit`` > 0 keeps the top rows only.
        """
        entries = report.entries[:limit] if limit > 0 else report.entries
        caps_text = [" / ".join(f"{c:.2f}" for c in e.rail_caps) for e in entries]

        channel_width = max([len("Channel")] + [len(e.channel) for e in entries])
        caps_width = max([len("Rail capacitances (fF)")] + [len(t) for t in caps_text])

        header = f"{'Channel':<{channel_width}}  {'Rail capacitances (fF)':<{caps_width}}  {'d_A':>6}"
        lines: List[str] = [header, "-" * len(header)]
        for entry, caps in zip(entries, caps_text):
            lines.append(f"{entry.channel:<{channel_width}}  {caps:<{caps_width}}  {entry.d_a:>6.2f}")
        lines.append("")
        lines.append(f"max d_A = {report.max_d_a:.2f}, mean d_A = {report.mean_d_a:.2f}")
        return "\n".join(lines) + "\n"
