// Walks the street-level link budget: path geometry, blocker reach, and the
// received power ladder for the direct and ground-reflected beams.

#include <cstdio>

#include "terra/terra.hpp"

int main() {
    using namespace terra;

    Pose bs{0, 0, 2.5, 0, 0};
    Pose ue{6, 0, 1.0, 180, 0};

    PathComponent los = los_path(bs, ue);
    GrLossTable table{{{0.0, 6.0}, {10.0, 4.6}, {20.0, 4.05}}};
    PathComponent gr = ground_reflection_path(bs, ue, table);

    std::printf("direct path: %.4f m, departs %.2f deg below horizontal\n", los.length_m,
                los.depart_zen_deg);
    double bx = 0, by = 0;
    gr_bounce_point(bs, ue, bx, by);
    std::printf("reflected path: %.4f m via ground at x=%.4f m, handset looks %.2f deg down\n",
                gr.length_m, bx, gr.arrive_zen_deg);
    std::printf("blocker reach: a %.2f m pedestrian matters within %.2f m of the handset\n\n", 1.78,
                d_br_max(6.0, 2.5, 1.0, 1.78));

    ChannelConfig cfg;
    cfg.gr_loss = table;
    ArrayGeometry g;
    g.elements_x = 12;
    auto aim = [&](double az, double zen) { return make_codebook(g, az, az, 1, zen, zen, 1); };

    for (double tilt : {0.0, 10.0, 20.0}) {
        Pose bs_t = bs;
        bs_t.boresight_zen_deg = tilt;
        ChannelConfig c = cfg;
        c.system_loss_db = calibrate_system_loss(c, bs_t, ue, g.boresight_gain_db,
                                                 g.boresight_gain_db, -60.0);
        PathComponent grt = ground_reflection_path(bs_t, ue, table);
        Codebook tx = aim(wrap_deg(grt.depart_az_deg - bs_t.boresight_az_deg),
                          grt.depart_zen_deg - tilt);
        Codebook rx = aim(wrap_deg(grt.arrive_az_deg - ue.boresight_az_deg), grt.arrive_zen_deg);
        PathRss r = rss_detail(c, bs_t, ue, tx, 0, rx, 0, {});
        std::printf("tilt %4.1f deg: reflected-beam rss %.2f dBm (direct link pinned at -60)\n",
                    tilt, r.total_dbm);
    }
    return 0;
}
