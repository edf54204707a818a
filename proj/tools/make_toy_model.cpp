// Regenerates the bundled synthetic model file (data/toy_biped.json).

#include <iostream>

#include "hybrik/io.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: hybrik-make-toy-model <output.json>\n";
        return 2;
    }
    const hybrik::BodyModel model = hybrik::toy_biped();
    hybrik::save_model(model, argv[1]);
    std::cout << "wrote " << argv[1] << " (" << model.joint_count() << " joints, "
              << model.vertex_count() << " vertices)\n";
    return 0;
}
