#ifndef PERM_LIB_H
#define PERM_LIB_H

namespace shapes
{
    class Shape
    {
      public:
        double area() const;
        Shape();
        double scale(const double factor);
        double scale(const double fx, const double fy);
    };

    Shape unit();

    class Circle : public Shape
    {
      public:
        double radius;
        Circle(const double radius);
    };

    enum Kind
    {
        ROUND,
        SQUARE
    };
}

#endif
