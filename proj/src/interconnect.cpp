#include "shinf/interconnect.hpp"

#include <map>
#include <string>

namespace shinf {

namespace {

void check_terms(const std::vector<DelayedTerm>& terms, Eigen::Index rows, Eigen::Index cols,
                 const char* name) {
    for (const auto& t : terms) {
        if (t.matrix.rows() != rows || t.matrix.cols() != cols) {
            throw DimensionError(std::string("plant block ") + name + " must be " +
                                 std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                                 std::to_string(t.matrix.rows()) + "x" +
                                 std::to_string(t.matrix.cols()));
        }
        if (t.delay < 0.0) throw DimensionError(std::string("negative delay in block ") + name);
    }
}

bool any_nonzero(const std::vector<DelayedTerm>& terms) {
    for (const auto& t : terms) {
        if (t.matrix.size() > 0 && t.matrix.cwiseAbs().maxCoeff() != 0.0) return true;
    }
    return false;
}

bool any_delayed(const std::vector<DelayedTerm>& terms) {
    for (const auto& t : terms) {
        if (t.delay > 0.0) return true;
    }
    return false;
}

// Collects A-blocks keyed by delay value (0 = A0).
class Assembly {
public:
    explicit Assembly(Eigen::Index n) : n_(n) {}

    void add(double delay, Eigen::Index row, Eigen::Index col, const Matrix& block) {
        if (block.size() == 0) return;
        Matrix& target = slot(delay);
        target.block(row, col, block.rows(), block.cols()) += block;
    }
    Matrix& slot(double delay) {
        auto it = blocks_.find(delay);
        if (it == blocks_.end()) it = blocks_.emplace(delay, Matrix::Zero(n_, n_)).first;
        return it->second;
    }
    const std::map<double, Matrix>& blocks() const { return blocks_; }

private:
    Eigen::Index n_;
    std::map<double, Matrix> blocks_;
};

struct Flags {
    bool neutral = false;
    bool y_slack = false;
    bool w_slack = false;
    bool z_slack = false;
};

Flags slack_flags(const PlantModel& plant) {
    Flags f;
    f.neutral = !plant.H.empty();
    f.y_slack = any_nonzero(plant.Dyw);
    f.w_slack = any_nonzero(plant.Dzw) || any_delayed(plant.Bw) || any_delayed(plant.Dyw) ||
                any_delayed(plant.Dzw);
    f.z_slack = any_delayed(plant.Cz) || any_delayed(plant.Dzu) || any_delayed(plant.Dzw);
    return f;
}

ClosedLoopLayout make_layout(const PlantModel& plant, Eigen::Index nc, const Flags& f) {
    ClosedLoopLayout L;
    Eigen::Index pos = 0;
    if (f.neutral) {
        L.zeta = pos;
        pos += plant.nx;
    } else {
        L.x = pos;
        pos += plant.nx;
    }
    L.xc = pos;
    pos += nc;
    if (f.neutral) {
        L.x = pos;
        pos += plant.nx;
    }
    L.u = pos;
    pos += plant.nu;
    if (f.y_slack) {
        L.y = pos;
        pos += plant.ny;
    }
    if (f.w_slack) {
        L.w = pos;
        pos += plant.nw;
    }
    if (f.z_slack) {
        L.z = pos;
        pos += plant.nz;
    }
    L.n = pos;
    return L;
}

// Adds gain * y(t - extra) to the given rows, expanding y when it has no slack
// state. Only y terms without w reach here in that case.
void add_measured(Assembly& as, const PlantModel& plant, const ClosedLoopLayout& L,
                  Eigen::Index row, const Matrix& gain, double extra) {
    if (gain.size() == 0) return;
    if (L.y >= 0) {
        as.add(extra, row, L.y, gain);
        return;
    }
    for (const auto& t : plant.Cy) as.add(extra + t.delay, row, L.x, gain * t.matrix);
    for (const auto& t : plant.Dyu) as.add(extra + t.delay, row, L.u, gain * t.matrix);
}

// Structural contribution of the plant (everything that does not involve
// controller matrices). Fills E, B, C and the constant A-blocks.
void assemble_plant(const PlantModel& plant, const ClosedLoopLayout& L, Assembly& as, Matrix& E,
                    Matrix& B, Matrix& C) {
    const Eigen::Index nx = plant.nx;
    const Eigen::Index row_x_dyn = L.zeta >= 0 ? L.zeta : L.x;
    const Matrix Ix = Matrix::Identity(nx, nx);

    E.block(row_x_dyn, row_x_dyn, nx, nx) = Ix;
    for (const auto& t : plant.A) as.add(t.delay, row_x_dyn, L.x, t.matrix);
    for (const auto& t : plant.Bu) as.add(t.delay, row_x_dyn, L.u, t.matrix);
    for (const auto& t : plant.Bw) {
        if (L.w >= 0) {
            as.add(t.delay, row_x_dyn, L.w, t.matrix);
        } else {
            B.block(row_x_dyn, 0, nx, plant.nw) += t.matrix;
        }
    }

    if (L.zeta >= 0) {
        // 0 = -zeta + x + sum H x(t-h)
        as.add(0.0, L.x, L.zeta, -Ix);
        as.add(0.0, L.x, L.x, Ix);
        for (const auto& t : plant.H) as.add(t.delay, L.x, L.x, t.matrix);
    }

    as.add(0.0, L.u, L.u, -Matrix::Identity(plant.nu, plant.nu));

    if (L.y >= 0) {
        as.add(0.0, L.y, L.y, -Matrix::Identity(plant.ny, plant.ny));
        for (const auto& t : plant.Cy) as.add(t.delay, L.y, L.x, t.matrix);
        for (const auto& t : plant.Dyu) as.add(t.delay, L.y, L.u, t.matrix);
        for (const auto& t : plant.Dyw) {
            if (L.w >= 0) {
                as.add(t.delay, L.y, L.w, t.matrix);
            } else {
                B.block(L.y, 0, plant.ny, plant.nw) += t.matrix;
            }
        }
    }

    if (L.w >= 0) {
        as.add(0.0, L.w, L.w, -Matrix::Identity(plant.nw, plant.nw));
        B.block(L.w, 0, plant.nw, plant.nw) = Matrix::Identity(plant.nw, plant.nw);
    }

    if (L.z >= 0) {
        as.add(0.0, L.z, L.z, -Matrix::Identity(plant.nz, plant.nz));
        for (const auto& t : plant.Cz) as.add(t.delay, L.z, L.x, t.matrix);
        for (const auto& t : plant.Dzu) as.add(t.delay, L.z, L.u, t.matrix);
        for (const auto& t : plant.Dzw) as.add(t.delay, L.z, L.w, t.matrix);
        C.block(0, L.z, plant.nz, plant.nz) = Matrix::Identity(plant.nz, plant.nz);
    } else {
        for (const auto& t : plant.Cz) C.block(0, L.x, plant.nz, nx) += t.matrix;
        for (const auto& t : plant.Dzu) C.block(0, L.u, plant.nz, plant.nu) += t.matrix;
        for (const auto& t : plant.Dzw) C.block(0, L.w, plant.nz, plant.nw) += t.matrix;
    }
}

// Contribution of the controller matrices; linear in (Ac, Bc, Cc, Dc).
void assemble_controller(const PlantModel& plant, const ClosedLoopLayout& L,
                         const ControllerStructure::Matrices& k, double input_delay,
                         Assembly& as) {
    const Eigen::Index nc = k.Ac.rows();
    if (nc > 0) {
        as.add(0.0, L.xc, L.xc, k.Ac);
        add_measured(as, plant, L, L.xc, k.Bc, input_delay);
        as.add(0.0, L.u, L.xc, k.Cc);
    }
    add_measured(as, plant, L, L.u, k.Dc, input_delay);
}

}  // namespace

void PlantModel::validate() const {
    if (nx <= 0) throw DimensionError("plant needs at least one state");
    check_terms(A, nx, nx, "A");
    check_terms(H, nx, nx, "H");
    check_terms(Bw, nx, nw, "Bw");
    check_terms(Bu, nx, nu, "Bu");
    check_terms(Cz, nz, nx, "Cz");
    check_terms(Dzw, nz, nw, "Dzw");
    check_terms(Dzu, nz, nu, "Dzu");
    check_terms(Cy, ny, nx, "Cy");
    check_terms(Dyw, ny, nw, "Dyw");
    check_terms(Dyu, ny, nu, "Dyu");
    for (const auto& t : H) {
        if (!(t.delay > 0.0)) throw DimensionError("neutral terms H need positive delays");
    }
}

ControllerStructure::ControllerStructure(Eigen::Index order, Eigen::Index nu, Eigen::Index ny)
    : nc_(order), nu_(nu), ny_(ny) {
    if (order < 0 || nu < 0 || ny < 0) throw DimensionError("negative controller dimension");
    fixed_ = {Matrix::Zero(nc_, nc_), Matrix::Zero(nc_, ny_), Matrix::Zero(nu_, nc_),
              Matrix::Zero(nu_, ny_)};
    masks_[0] = Mask::Constant(nc_, nc_, true);
    masks_[1] = Mask::Constant(nc_, ny_, true);
    masks_[2] = Mask::Constant(nu_, nc_, true);
    masks_[3] = Mask::Constant(nu_, ny_, true);
}

ControllerStructure ControllerStructure::static_gain(Eigen::Index nu, Eigen::Index ny,
                                                     double input_delay) {
    ControllerStructure c(0, nu, ny);
    c.set_input_delay(input_delay);
    return c;
}

std::size_t ControllerStructure::num_params() const {
    std::size_t n = 0;
    for (const auto& m : masks_) n += static_cast<std::size_t>(m.count());
    return n;
}

void ControllerStructure::set_input_delay(double tau) {
    if (tau < 0.0) throw DimensionError("controller input delay must be nonnegative");
    input_delay_ = tau;
}

void ControllerStructure::set_fixed(const Matrices& values) {
    if (values.Ac.rows() != nc_ || values.Ac.cols() != nc_ || values.Bc.rows() != nc_ ||
        values.Bc.cols() != ny_ || values.Cc.rows() != nu_ || values.Cc.cols() != nc_ ||
        values.Dc.rows() != nu_ || values.Dc.cols() != ny_) {
        throw DimensionError("controller fixed values have wrong dimensions");
    }
    fixed_ = values;
}

void ControllerStructure::set_masks(Mask ac, Mask bc, Mask cc, Mask dc) {
    Mask* in[4] = {&ac, &bc, &cc, &dc};
    for (int i = 0; i < 4; ++i) {
        if (in[i]->rows() != masks_[i].rows() || in[i]->cols() != masks_[i].cols()) {
            throw DimensionError("controller mask has wrong dimensions");
        }
        masks_[i] = std::move(*in[i]);
    }
}

ControllerStructure::Matrices ControllerStructure::unpack(const Vector& p, bool with_fixed) const {
    if (static_cast<std::size_t>(p.size()) != num_params()) {
        throw DimensionError("controller expects " + std::to_string(num_params()) +
                             " parameters, got " + std::to_string(p.size()));
    }
    Matrices out = fixed_;
    Matrix* mats[4] = {&out.Ac, &out.Bc, &out.Cc, &out.Dc};
    Eigen::Index k = 0;
    for (int which = 0; which < 4; ++which) {
        Matrix& m = *mats[which];
        if (!with_fixed) m.setZero();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (masks_[which](r, c)) m(r, c) = p(k++);
            }
        }
    }
    return out;
}

Vector ControllerStructure::pack(const Matrices& m) const {
    Vector p(static_cast<Eigen::Index>(num_params()));
    const Matrix* mats[4] = {&m.Ac, &m.Bc, &m.Cc, &m.Dc};
    Eigen::Index k = 0;
    for (int which = 0; which < 4; ++which) {
        for (Eigen::Index r = 0; r < masks_[which].rows(); ++r) {
            for (Eigen::Index c = 0; c < masks_[which].cols(); ++c) {
                if (masks_[which](r, c)) p(k++) = (*mats[which])(r, c);
            }
        }
    }
    return p;
}

AffineDdae interconnect(const PlantModel& plant, const ControllerStructure& ctrl,
                        ClosedLoopLayout* layout_out) {
    plant.validate();
    if (ctrl.nu() != plant.nu || ctrl.ny() != plant.ny) {
        throw DimensionError("controller is " + std::to_string(ctrl.nu()) + "x" +
                             std::to_string(ctrl.ny()) + " but plant has nu=" +
                             std::to_string(plant.nu) + ", ny=" + std::to_string(plant.ny));
    }
    const Flags flags = slack_flags(plant);
    const ClosedLoopLayout L = make_layout(plant, ctrl.order(), flags);
    if (layout_out) *layout_out = L;

    Matrix E = Matrix::Zero(L.n, L.n);
    Matrix B = Matrix::Zero(L.n, plant.nw);
    Matrix C = Matrix::Zero(plant.nz, L.n);
    Assembly base(L.n);
    assemble_plant(plant, L, base, E, B, C);
    if (ctrl.order() > 0) {
        E.block(L.xc, L.xc, ctrl.order(), ctrl.order()).setIdentity();
    }
    const std::size_t np = ctrl.num_params();
    assemble_controller(plant, L, ctrl.unpack(Vector::Zero(static_cast<Eigen::Index>(np))),
                        ctrl.input_delay(), base);

    // Linear parts per parameter: controller with a single unit free entry.
    std::vector<Assembly> linear;
    linear.reserve(np);
    for (std::size_t k = 0; k < np; ++k) {
        Vector e = Vector::Zero(static_cast<Eigen::Index>(np));
        e(static_cast<Eigen::Index>(k)) = 1.0;
        Assembly part(L.n);
        assemble_controller(plant, L, ctrl.unpack(e, false), ctrl.input_delay(), part);
        linear.push_back(std::move(part));
    }

    // Delay set: every delay any part touches, including delays reached only
    // through free parameters.
    for (const auto& part : linear) {
        for (const auto& [delay, m] : part.blocks()) base.slot(delay);
    }
    base.slot(0.0);

    std::vector<double> taus;
    std::vector<Matrix> A;
    for (const auto& [delay, m] : base.blocks()) {
        if (delay > 0.0) taus.push_back(delay);
        A.push_back(m);
    }

    AffineDdae out;
    out.base = DdaeSystem(std::move(E), std::move(A), std::move(B), std::move(C), taus);
    out.dA.resize(np);
    for (std::size_t k = 0; k < np; ++k) {
        auto& dk = out.dA[k];
        for (const auto& [delay, unused] : base.blocks()) {
            auto it = linear[k].blocks().find(delay);
            dk.push_back(it == linear[k].blocks().end() ? Matrix::Zero(L.n, L.n) : it->second);
        }
    }
    return out;
}

DdaeSystem interconnect(const PlantModel& plant, const ControllerStructure& ctrl, const Vector& p) {
    return substitute_parameters(interconnect(plant, ctrl), p);
}

}  // namespace shinf
