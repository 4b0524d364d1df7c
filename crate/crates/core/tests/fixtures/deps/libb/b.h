#ifndef LIBB_B_H
#define LIBB_B_H

#include "../liba/a.h"

namespace libb
{
    class Particle
    {
      public:
        Particle();
        liba::Vector3 position() const;
        void move(const liba::Vector3& delta);
    };
}

#endif
